// WebSocket session client: connects, configures, forwards input
// messages, and feeds parsed state into the view model.

import { ClientInputMessage, SessionConfig, parseServerMessage, ProtocolViolation } from "./protocol.js";
import { ViewModel } from "./viewmodel.js";

export class SessionClient {
  private ws: WebSocket | null = null;

  constructor(
    readonly url: string,
    readonly vm: ViewModel,
    readonly config: SessionConfig,
  ) {}

  connect(): void {
    this.vm.connection = "connecting";
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.vm.connection = "open";
      ws.send(JSON.stringify({ type: "configure", config: this.config }));
    };
    ws.onmessage = (event: MessageEvent) => {
      let msg;
      try {
        msg = parseServerMessage(String(event.data));
      } catch (err) {
        if (err instanceof ProtocolViolation) {
          console.error("protocol violation:", err.message);
          return;
        }
        throw err;
      }
      if (msg.type === "error") {
        this.vm.lastError = `${msg.code}: ${msg.detail}`;
        console.error("server error:", msg.code, msg.detail);
        return;
      }
      this.vm.applyState(msg, performance.now());
    };
    ws.onclose = () => {
      this.vm.connection = "closed";
    };
    ws.onerror = () => {
      this.vm.connection = "closed";
    };
  }

  sendInput(msg: ClientInputMessage): void {
    if (this.ws !== null && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  sendReset(): void {
    if (this.ws !== null && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify({ type: "reset" }));
      this.vm.reset();
    }
  }
}
