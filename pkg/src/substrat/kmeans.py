"""Small seeded k-means (k-means++ init) used by the clustering baseline.

Kept dependency-free so baseline runs are reproducible bit-for-bit from a
single numpy Generator.
"""
from __future__ import annotations

import numpy as np


def kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: spread the k initial centroids by sampling points
    proportionally to squared distance from the nearest chosen centroid."""
    n = len(points)
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    d2 = np.full(n, np.inf)
    for i in range(1, k):
        dist = points - centroids[i - 1]
        np.minimum(d2, np.einsum("ij,ij->i", dist, dist), out=d2)
        total = d2.sum()
        if total <= 0:  # fewer distinct points than centroids
            centroids[i] = points[rng.integers(n)]
            continue
        centroids[i] = points[rng.choice(n, p=d2 / total)]
    return centroids


def kmeans(points: np.ndarray, k: int, rng: np.random.Generator,
           max_iter: int = 50, tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations from a k-means++ start.

    Returns (centroids, labels). Stops on max_iter or when inertia improves
    by less than tol relatively.
    """
    points = np.asarray(points, dtype=np.float64)
    centroids = kmeans_pp_init(points, k, rng)
    prev_inertia = np.inf
    labels = np.zeros(len(points), dtype=np.int64)
    for _ in range(max_iter):
        # squared distances to every centroid: (n, k)
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        inertia = float(d2[np.arange(len(points)), labels].sum())
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
            else:  # dead centroid: restart it on the worst-fit point
                centroids[j] = points[int(d2.min(axis=1).argmax())]
        if prev_inertia - inertia <= tol * max(prev_inertia, 1.0):
            break
        prev_inertia = inertia
    return centroids, labels


def nearest_distinct(points: np.ndarray, centroids: np.ndarray) -> list[int]:
    """Index of the point nearest each centroid; collisions are resolved by
    the next-nearest unused point."""
    out: list[int] = []
    taken = set()
    for c in centroids:
        d2 = ((points - c) ** 2).sum(axis=1)
        for idx in np.argsort(d2, kind="stable"):
            if int(idx) not in taken:
                out.append(int(idx))
                taken.add(int(idx))
                break
    return out
