"""Simulated workspace scene: objects, a pinhole camera facing the scene,
and the raycast that turns a gaze pixel into a 3-D target point.

Scene frame: meters, x to the right, y away from the camera (the depth
the operator cannot judge), z up, floor at z = 0. The camera sits in
front of the workspace with a slight downward pitch so every gaze ray of
interest meets either an object or the floor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .gaze import SCREEN_H, SCREEN_W

SCENE_SCHEMA = "scene/1"


class OutOfBoundsError(ValueError):
    """Gaze centroid outside the camera frame."""


class SceneError(ValueError):
    """Malformed scene description."""


@dataclass(frozen=True)
class Camera:
    """Pinhole camera with a downward pitch about the x axis.

    pos is the optical center in scene meters; pitch_deg tilts the view
    direction below the horizontal.
    """

    pos: tuple[float, float, float] = (0.25, -0.55, 0.18)
    pitch_deg: float = 8.0
    fx: float = 600.0
    fy: float = 600.0
    cx: float = SCREEN_W / 2.0
    cy: float = SCREEN_H / 2.0
    width: int = SCREEN_W
    height: int = SCREEN_H

    def _basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        phi = math.radians(self.pitch_deg)
        forward = np.array([0.0, math.cos(phi), -math.sin(phi)])
        right = np.array([1.0, 0.0, 0.0])
        up = np.array([0.0, math.sin(phi), math.cos(phi)])
        return forward, right, up

    def project(self, p: np.ndarray) -> tuple[float, float]:
        """Scene point to pixel coordinates; the point must be in front."""
        forward, right, up = self._basis()
        q = np.asarray(p, dtype=float) - np.asarray(self.pos)
        depth = float(q @ forward)
        if depth <= 1e-9:
            raise SceneError("point is behind the camera")
        u = self.cx + self.fx * float(q @ right) / depth
        v = self.cy - self.fy * float(q @ up) / depth
        return u, v

    def pixel_ray(self, u: float, v: float) -> tuple[np.ndarray, np.ndarray]:
        """Origin and unit direction of the ray through pixel (u, v)."""
        forward, right, up = self._basis()
        d = forward + ((u - self.cx) / self.fx) * right - ((v - self.cy) / self.fy) * up
        d = d / np.linalg.norm(d)
        return np.asarray(self.pos, dtype=float), d

    def to_dict(self) -> dict:
        return {
            "pos": list(self.pos),
            "pitch_deg": self.pitch_deg,
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
        }

    @staticmethod
    def from_dict(doc: dict) -> "Camera":
        return Camera(
            pos=tuple(doc["pos"]),
            pitch_deg=float(doc["pitch_deg"]),
            fx=float(doc["fx"]),
            fy=float(doc["fy"]),
            cx=float(doc["cx"]),
            cy=float(doc["cy"]),
            width=int(doc["width"]),
            height=int(doc["height"]),
        )


@dataclass(frozen=True)
class SceneObject:
    """Sphere, box, or strip-with-marked-segment. Boxes and strips are
    axis aligned; a strip runs along x and carries the marked x range."""

    id: str
    shape: str
    center: tuple[float, float, float]
    radius: float = 0.0
    size: tuple[float, float, float] = (0.0, 0.0, 0.0)
    marked_x: tuple[float, float] = (0.0, 0.0)
    hazard: bool = False

    def contains(self, p: np.ndarray, margin: float = 0.0) -> bool:
        c = np.asarray(self.center)
        if self.shape == "sphere":
            return bool(np.linalg.norm(p - c) <= self.radius + margin)
        half = np.asarray(self.size) / 2.0 + margin
        return bool(np.all(np.abs(p - c) <= half))

    def to_dict(self) -> dict:
        doc = {"id": self.id, "shape": self.shape, "center": list(self.center), "hazard": self.hazard}
        if self.shape == "sphere":
            doc["radius"] = self.radius
        else:
            doc["size"] = list(self.size)
        if self.shape == "strip":
            doc["marked_x"] = list(self.marked_x)
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "SceneObject":
        shape = doc["shape"]
        if shape not in ("sphere", "box", "strip"):
            raise SceneError(f"unknown shape {shape!r}")
        return SceneObject(
            id=str(doc["id"]),
            shape=shape,
            center=tuple(doc["center"]),
            radius=float(doc.get("radius", 0.0)),
            size=tuple(doc.get("size", (0.0, 0.0, 0.0))),
            marked_x=tuple(doc.get("marked_x", (0.0, 0.0))),
            hazard=bool(doc.get("hazard", False)),
        )


def _ray_sphere(origin, direction, center, radius) -> Optional[float]:
    oc = origin - center
    b = float(oc @ direction)
    c = float(oc @ oc) - radius * radius
    disc = b * b - c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    for t in (-b - root, -b + root):
        if t > 1e-9:
            return t
    return None


def _ray_box(origin, direction, center, size) -> Optional[float]:
    half = np.asarray(size) / 2.0
    lo = np.asarray(center) - half
    hi = np.asarray(center) + half
    t_near, t_far = -math.inf, math.inf
    for i in range(3):
        if abs(direction[i]) < 1e-12:
            if origin[i] < lo[i] or origin[i] > hi[i]:
                return None
            continue
        t1 = (lo[i] - origin[i]) / direction[i]
        t2 = (hi[i] - origin[i]) / direction[i]
        if t1 > t2:
            t1, t2 = t2, t1
        t_near = max(t_near, t1)
        t_far = min(t_far, t2)
    if t_near > t_far or t_far < 1e-9:
        return None
    return t_near if t_near > 1e-9 else t_far


@dataclass(frozen=True)
class Scene:
    objects: tuple[SceneObject, ...] = ()
    camera: Camera = field(default_factory=Camera)
    floor_z: float = 0.0
    workspace_lo: tuple[float, float, float] = (0.0, 0.0, 0.0)
    workspace_hi: tuple[float, float, float] = (0.5, 0.5, 0.5)

    def find(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise SceneError(f"no object with id {object_id!r}")

    @property
    def target(self) -> SceneObject:
        targets = [o for o in self.objects if not o.hazard and o.shape in ("sphere", "strip")]
        if len(targets) != 1:
            raise SceneError(f"scene must contain exactly one target, found {len(targets)}")
        return targets[0]

    def raycast(self, origin: np.ndarray, direction: np.ndarray) -> tuple[np.ndarray, Optional[SceneObject]]:
        """First surface hit along the ray; the floor backstops misses."""
        best_t: Optional[float] = None
        best_obj: Optional[SceneObject] = None
        for obj in self.objects:
            if obj.shape == "sphere":
                t = _ray_sphere(origin, direction, np.asarray(obj.center), obj.radius)
            else:
                t = _ray_box(origin, direction, obj.center, obj.size)
            if t is not None and (best_t is None or t < best_t):
                best_t, best_obj = t, obj
        if best_t is not None:
            return origin + best_t * direction, best_obj
        if direction[2] < -1e-12:
            t = (self.floor_z - origin[2]) / direction[2]
            if t > 1e-9:
                return origin + t * direction, None
        raise SceneError("gaze ray does not reach the scene")

    def to_norm(self, p: np.ndarray) -> np.ndarray:
        """Scene meters to the normalized unit workspace used by fixtures."""
        lo = np.asarray(self.workspace_lo)
        hi = np.asarray(self.workspace_hi)
        return (np.asarray(p, dtype=float) - lo) / (hi - lo)

    def from_norm(self, u: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.workspace_lo)
        hi = np.asarray(self.workspace_hi)
        return lo + np.asarray(u, dtype=float) * (hi - lo)

    def to_dict(self) -> dict:
        return {
            "schema": SCENE_SCHEMA,
            "objects": [o.to_dict() for o in self.objects],
            "camera": self.camera.to_dict(),
            "floor": {"z": self.floor_z},
            "workspace": {"lo": list(self.workspace_lo), "hi": list(self.workspace_hi)},
        }

    @staticmethod
    def from_dict(doc: dict) -> "Scene":
        if doc.get("schema") != SCENE_SCHEMA:
            raise SceneError(f"unsupported scene schema {doc.get('schema')!r}")
        return Scene(
            objects=tuple(SceneObject.from_dict(o) for o in doc["objects"]),
            camera=Camera.from_dict(doc["camera"]),
            floor_z=float(doc["floor"]["z"]),
            workspace_lo=tuple(doc["workspace"]["lo"]),
            workspace_hi=tuple(doc["workspace"]["hi"]),
        )


def save_scene(scene: Scene, path) -> None:
    with open(path, "w") as fh:
        json.dump(scene.to_dict(), fh, indent=2)
        fh.write("\n")


def load_scene(path) -> Scene:
    with open(path) as fh:
        return Scene.from_dict(json.load(fh))


def resolve_target(centroid_px: tuple[float, float], scene: Scene) -> np.ndarray:
    """Cast the camera ray through a gaze centroid into the scene.

    Returns the first surface hit, or the floor point under the ray when
    no object is struck. Centroids outside the camera frame are rejected.
    """
    u, v = centroid_px
    cam = scene.camera
    if not (0.0 <= u < cam.width and 0.0 <= v < cam.height):
        raise OutOfBoundsError(f"gaze centroid ({u:.1f}, {v:.1f}) outside the {cam.width}x{cam.height} frame")
    origin, direction = cam.pixel_ray(u, v)
    point, _ = scene.raycast(origin, direction)
    return point


def grasp_scene(ball_xy: tuple[float, float] = (0.25, 0.30), ball_z: float = 0.08) -> Scene:
    """Ball-on-a-stand pickup scene with hazard obstacles flanking the ball."""
    bx, by = ball_xy
    return Scene(
        objects=(
            SceneObject("ball", "sphere", (bx, by, ball_z), radius=0.015),
            SceneObject("stand", "box", (bx, by, ball_z / 2 - 0.0075), size=(0.02, 0.02, ball_z - 0.015)),
            SceneObject("obstacle_near", "box", (bx, by - 0.06, 0.03), size=(0.03, 0.03, 0.06), hazard=True),
            SceneObject("obstacle_far", "box", (bx, by + 0.06, 0.03), size=(0.03, 0.03, 0.06), hazard=True),
            SceneObject("obstacle_side", "box", (bx - 0.07, by, 0.03), size=(0.03, 0.03, 0.06), hazard=True),
        ),
    )


def cut_scene(marked_x_center: float = 0.25, strip_y: float = 0.30) -> Scene:
    """Paper strip along x with a marked cut segment; a hazard box sits
    just past the far end of the strip."""
    return Scene(
        objects=(
            SceneObject(
                "strip",
                "strip",
                (0.25, strip_y, 0.02),
                size=(0.30, 0.02, 0.002),
                marked_x=(marked_x_center - 0.01, marked_x_center + 0.01),
            ),
            SceneObject("clamp", "box", (0.25, strip_y + 0.05, 0.03), size=(0.04, 0.03, 0.06), hazard=True),
        ),
    )
