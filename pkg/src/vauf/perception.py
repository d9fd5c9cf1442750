"""Point-cloud pipeline: per-point normals, region growing, segment PCA.

Per-point normals come from k-nearest-neighbor covariance (smallest
eigenvector), oriented toward the camera origin. Region growing clusters
points whose normals stay within an angular threshold of the region seed.
The working segment's covariance eigenstructure yields the surface normal,
edge directions, and the local-curvature ratio. Everything is deterministic
for a given cloud.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque

import numpy as np
from scipy.spatial import cKDTree

from .camera import PointCloud
from .spatial import eig_sym3


class NoSegmentError(RuntimeError):
    """Segmentation produced no usable segment."""


class DegenerateSegmentError(RuntimeError):
    """Segment covariance has (near-)zero trace."""


@dataclass(frozen=True)
class PerceptionConfig:
    k: int = 10
    angle_thresh: float = np.deg2rad(8.0)
    min_segment_size: int = 30

    def __post_init__(self):
        if self.k < 5:
            raise ValueError("k must be at least 5")
        if not 0.0 < self.angle_thresh < 0.5 * np.pi:
            raise ValueError("angle_thresh must be in (0, pi/2)")


@dataclass(frozen=True)
class PointNormals:
    normals: np.ndarray  # (N, 3) unit, camera-facing
    curvature: np.ndarray  # (N,) smallest-eigenvalue ratio of the kNN covariance
    valid: np.ndarray  # (N,) bool, False for degenerate neighborhoods
    neighbors: np.ndarray  # (N, k) kNN indices, reused as the growing graph


@dataclass(frozen=True)
class Segment:
    indices: np.ndarray
    centroid: np.ndarray
    covariance: np.ndarray

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class PerceptionResult:
    n_s_camera: np.ndarray  # unit surface normal, camera frame
    e1: np.ndarray  # long edge
    e2: np.ndarray  # short edge
    eigenvalues: np.ndarray  # |l1| >= |l2| >= |l3|
    l_s: float  # |l3 / tr|
    theta: float  # rad, folded deviation from the camera axis
    valid: bool
    timestamp: float

    @classmethod
    def invalid(cls, timestamp: float = 0.0) -> "PerceptionResult":
        return cls(
            n_s_camera=np.array([0.0, 0.0, -1.0]),
            e1=np.array([1.0, 0.0, 0.0]),
            e2=np.array([0.0, 1.0, 0.0]),
            eigenvalues=np.zeros(3),
            l_s=0.0,
            theta=0.0,
            valid=False,
            timestamp=timestamp,
        )


def estimate_point_normals(cloud: PointCloud, k: int = 10) -> PointNormals:
    """Per-point unit normals from kNN covariance, oriented toward the camera.

    Points whose neighborhood is rank-deficient (collinear) are flagged
    invalid and take no part in region growing.
    """
    pts = cloud.points
    n = len(pts)
    if k < 5:
        raise ValueError("k must be at least 5")
    if n < k:
        raise ValueError(f"cloud has {n} points, need at least k={k}")
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=k)
    nb = pts[idx]  # (N, k, 3)
    centered = nb - nb.mean(axis=1, keepdims=True)
    cov = np.einsum("nki,nkj->nij", centered, centered) / k
    vals, vecs = np.linalg.eigh(cov)  # ascending
    normals = vecs[:, :, 0]
    trace = vals.sum(axis=1)
    valid = (trace > 0.0) & (vals[:, 1] > 1e-12 * np.maximum(trace, 1e-300))
    curvature = np.where(trace > 0.0, np.abs(vals[:, 0]) / np.maximum(trace, 1e-300), np.inf)
    # camera-facing: flip normals pointing away from the origin
    flip = np.einsum("ni,ni->n", normals, pts) > 0.0
    normals = np.where(flip[:, None], -normals, normals)
    return PointNormals(normals=normals, curvature=curvature, valid=valid, neighbors=idx)


def region_grow(
    cloud: PointCloud,
    normals: PointNormals,
    angle_thresh: float = np.deg2rad(8.0),
    min_segment_size: int = 30,
) -> list[Segment]:
    """Cluster points whose normals stay within angle_thresh of the seed.

    Seeds are taken at the lowest-curvature unvisited point; neighbors come
    from the kNN graph. Segments below min_segment_size are discarded; the
    survivors are sorted by size, largest first.
    """
    pts = cloud.points
    n = len(pts)
    if n == 0:
        raise NoSegmentError("empty cloud")
    cos_thresh = np.cos(angle_thresh)
    order = np.argsort(normals.curvature, kind="stable")
    visited = ~normals.valid.copy()
    segments: list[Segment] = []
    for seed in order:
        if visited[seed]:
            continue
        seed_normal = normals.normals[seed]
        members = [int(seed)]
        visited[seed] = True
        queue = deque([int(seed)])
        while queue:
            i = queue.popleft()
            for j in normals.neighbors[i]:
                if visited[j]:
                    continue
                if seed_normal @ normals.normals[j] >= cos_thresh:
                    visited[j] = True
                    members.append(int(j))
                    queue.append(int(j))
        if len(members) >= min_segment_size:
            segments.append(_make_segment(pts, np.array(members)))
    if not segments:
        raise NoSegmentError("no segment above minimum size")
    segments.sort(key=lambda s: -s.size)
    return segments


def _make_segment(points: np.ndarray, indices: np.ndarray) -> Segment:
    member = points[indices]
    centroid = member.mean(axis=0)
    centered = member - centroid
    cov = centered.T @ centered / len(member)
    return Segment(indices=indices, centroid=centroid, covariance=cov)


def segment_from_points(points: np.ndarray) -> Segment:
    """Build a segment directly from raw points (synthetic-cloud helper)."""
    return _make_segment(np.asarray(points, dtype=float), np.arange(len(points)))


def select_working_segment(segments: list[Segment]) -> Segment:
    """Segment whose centroid lies closest to the camera axis; ties go to size."""
    if not segments:
        raise NoSegmentError("no segments to select from")
    best = None
    best_dist = np.inf
    for seg in segments:  # already size-descending, so ties keep the larger
        dist = float(np.hypot(seg.centroid[0], seg.centroid[1]))
        if dist < best_dist - 1e-12:
            best = seg
            best_dist = dist
    return best


def segment_pca(segment: Segment, timestamp: float = 0.0) -> PerceptionResult:
    """Eigenstructure of the segment covariance: normal, edges, curvature ratio."""
    trace = float(np.trace(segment.covariance))
    if trace < 1e-12:
        raise DegenerateSegmentError("segment covariance trace below 1e-12")
    vals, vecs = eig_sym3(segment.covariance)
    n_s = vecs[:, 2]
    if n_s @ segment.centroid > 0.0:  # camera-facing
        n_s = -n_s
    l_s = abs(vals[2] / vals.sum())
    return PerceptionResult(
        n_s_camera=n_s,
        e1=vecs[:, 0],
        e2=vecs[:, 1],
        eigenvalues=vals,
        l_s=float(l_s),
        theta=orientation_error(n_s),
        valid=True,
        timestamp=timestamp,
    )


def orientation_error(n_s_camera: np.ndarray) -> float:
    """Folded angle between the surface normal and the camera axis, [0, pi/2]."""
    return float(np.arccos(np.clip(abs(n_s_camera[2]), 0.0, 1.0)))


def perceive(cloud: PointCloud, cfg: PerceptionConfig) -> PerceptionResult:
    """Full pipeline: normals -> region growing -> working segment -> PCA."""
    if len(cloud) < cfg.k:
        raise NoSegmentError(f"cloud too small ({len(cloud)} points)")
    normals = estimate_point_normals(cloud, cfg.k)
    segments = region_grow(cloud, normals, cfg.angle_thresh, cfg.min_segment_size)
    working = select_working_segment(segments)
    return segment_pca(working, timestamp=cloud.timestamp)
