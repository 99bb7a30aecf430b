"""Naive reference implementations backing the built-in self test.

Everything here is written as plain per-sample loops over ``np.outer`` so
the fast paths in :mod:`salda.scatter` and :mod:`salda.saliency` can be
checked against an independently coded route.  Inputs are lists of
per-class row matrices (samples as rows).
"""

import numpy as np

from .linalg import ridge_amount
from .saliency import CONDITION_LIMIT


def class_means(classes):
    return [np.mean(rows, axis=0) for rows in classes]


def total_mean(classes):
    acc = np.zeros(classes[0].shape[1])
    n = 0
    for rows in classes:
        for x in rows:
            acc = acc + x
            n += 1
    return acc / n


def classic_sw(classes):
    mus = class_means(classes)
    out = np.zeros((classes[0].shape[1],) * 2)
    for rows, mu in zip(classes, mus):
        for x in rows:
            out = out + np.outer(x - mu, x - mu)
    return out


def classic_sb(classes):
    mus = class_means(classes)
    mu = total_mean(classes)
    out = np.zeros((classes[0].shape[1],) * 2)
    for rows, mu_c in zip(classes, mus):
        out = out + len(rows) * np.outer(mu_c - mu, mu_c - mu)
    return out


def pair_between(classes, weight_fn):
    mus = class_means(classes)
    n = sum(len(rows) for rows in classes)
    out = np.zeros((classes[0].shape[1],) * 2)
    for c in range(len(classes) - 1):
        for j in range(c + 1, len(classes)):
            diff = mus[c] - mus[j]
            w = weight_fn(float(np.linalg.norm(diff)))
            pc = len(classes[c]) / n
            pj = len(classes[j]) / n
            out = out + w * pc * pj * np.outer(diff, diff)
    return out


def relevance(classes, c):
    mus = class_means(classes)
    total = 0.0
    for i in range(len(classes)):
        if i != c:
            total += 1.0 / np.linalg.norm(mus[i] - mus[c])
    return total


def tang_sw(classes):
    mus = class_means(classes)
    n = sum(len(rows) for rows in classes)
    out = np.zeros((classes[0].shape[1],) * 2)
    for c, rows in enumerate(classes):
        w = (len(rows) / n) * relevance(classes, c)
        for x in rows:
            out = out + w * np.outer(x - mus[c], x - mus[c])
    return out


def jarchi_deltas(classes):
    mus = class_means(classes)
    s_t = classic_sb(classes) + classic_sw(classes)
    s_t = s_t + ridge_amount(s_t) * np.eye(s_t.shape[0])
    c_n = len(classes)
    deltas = np.zeros((c_n, c_n))
    for c in range(c_n):
        for j in range(c_n):
            if c == j:
                continue
            diff = mus[c] - mus[j]
            w = np.linalg.solve(s_t, diff)
            denom = w @ s_t @ w
            deltas[c, j] = 0.0 if denom == 0.0 else (w @ diff) ** 2 / denom
    return deltas


def jarchi_pair(classes):
    mus = class_means(classes)
    n = sum(len(rows) for rows in classes)
    deltas = jarchi_deltas(classes)
    c_n = len(classes)
    dim = classes[0].shape[1]
    s_b = np.zeros((dim, dim))
    for c in range(c_n - 1):
        for j in range(c + 1, c_n):
            diff = mus[c] - mus[j]
            s_b = s_b + (len(classes[c]) * len(classes[j]) / deltas[c, j]) * np.outer(diff, diff)
    s_w = np.zeros((dim, dim))
    for c, rows in enumerate(classes):
        denom = sum(deltas[c, j] for j in range(c_n) if j != c)
        w = (len(rows) / n) / denom
        for x in rows:
            s_w = s_w + w * np.outer(x - mus[c], x - mus[c])
    return s_b, s_w


def saliency_sw(classes, ps, j):
    mus = class_means(classes)
    dim = classes[0].shape[1]
    out = np.zeros((dim, dim))
    for c, rows in enumerate(classes):
        scale = relevance(classes, c) if j == 2 else 1.0
        for k, x in enumerate(rows):
            out = out + ps[c][k] * scale * np.outer(x - mus[c], x - mus[c])
    return out


def saliency_sb(classes, ps, i):
    mus = class_means(classes)
    mu = total_mean(classes)
    reps = [rows.T @ p for rows, p in zip(classes, ps)]
    dim = classes[0].shape[1]
    out = np.zeros((dim, dim))
    if i == 1:
        for rows, mu_c in zip(classes, mus):
            out = out + len(rows) * np.outer(mu_c - mu, mu_c - mu)
    elif i == 2:
        for rep in reps:
            out = out + np.outer(rep - mu, rep - mu)
    elif i == 3:
        for r1 in reps:
            for r2 in reps:
                out = out + np.outer(r1 - r2, r1 - r2)
    else:
        for c1, rows in enumerate(classes):
            for c2, rep in enumerate(reps):
                if c2 == c1:
                    continue
                for k, x in enumerate(rows):
                    out = out + ps[c1][k] * np.outer(x - rep, x - rep)
    return out


def saliency_solve(weights, v, epsilon):
    """Dense-inverse route: inv(H) @ 1, clamp, normalize; same ridge policy
    as the production solver."""
    n = weights.shape[0]
    h = np.diag(weights.sum(axis=1)) - weights + np.diag(v)
    cond = np.linalg.cond(h)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        eps = max(epsilon, 1e-8 * np.trace(h) / n)
        if eps == 0.0:
            eps = max(epsilon, 1e-8)
        h = h + eps * np.eye(n)
    q = np.linalg.inv(h) @ np.ones(n)
    q = np.maximum(q, 0.0)
    return q / q.sum()
