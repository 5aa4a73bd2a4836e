"""Hand-coded reference implementations and stub objects for tests.

Everything here is written with plain Python loops, independent of the
package's vectorized code paths, so it can serve as an oracle.
"""

import math

import numpy as np


class MatrixAffinity:
    """Affinity stub backed by explicit per-hop weight matrices."""

    def __init__(self, mats):
        self.mats = [np.asarray(m, dtype=np.float64) for m in mats]
        self.num_nodes = self.mats[0].shape[0]
        self.num_hops = len(mats) - 1
        self.floor = float(min(m.min() for m in self.mats))

    @property
    def mode(self):
        return "stub"

    def omega(self, k, rows=None):
        return self.mats[k] if rows is None else self.mats[k][rows]

    def log_omega(self, k):
        return np.log(self.mats[k])

    def omega_pairs(self, k, ii, jj):
        return self.mats[k][ii, jj]


def cosine(a, b):
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def brute_force_total_loss(zu, zv, omega_mats, lambdas, tau):
    """Loop-based evaluation of the symmetrized cross-scale objective."""
    n = zu[0].shape[0]
    hops = len(zu) - 1
    total = 0.0
    for za, zb in ((zu, zv), (zv, zu)):
        for i in range(n):
            for k in range(hops + 1):
                if lambdas[k] == 0.0:
                    continue
                pos = math.exp(cosine(za[hops][i], zb[k][i]) / tau)
                denom = pos
                for j in range(n):
                    if j == i:
                        continue
                    w = float(omega_mats[k][i, j])
                    denom += w * math.exp(cosine(za[hops][i], zb[k][j]) / tau)
                    denom += w * math.exp(cosine(za[hops][i], za[k][j]) / tau)
                total += lambdas[k] * math.log(pos / denom)
    return total / (2.0 * n)


def grace_reference(zu_final, zv_final, tau):
    """Plain same-scale InfoNCE over final-layer vectors, loop form."""
    n = zu_final.shape[0]
    total = 0.0
    for za, zb in ((zu_final, zv_final), (zv_final, zu_final)):
        for i in range(n):
            pos = math.exp(cosine(za[i], zb[i]) / tau)
            denom = pos
            for j in range(n):
                if j == i:
                    continue
                denom += math.exp(cosine(za[i], zb[j]) / tau)
                denom += math.exp(cosine(za[i], za[j]) / tau)
            total += math.log(pos / denom)
    return total / (2.0 * n)


def nmi_reference(truth, pred):
    """Contingency-table mutual information over explicit loops."""
    truth = list(truth)
    pred = list(pred)
    n = len(truth)
    t_values = sorted(set(truth))
    p_values = sorted(set(pred))

    def entropy(assignment, values):
        h = 0.0
        for v in values:
            p = sum(1 for a in assignment if a == v) / n
            if p > 0:
                h -= p * math.log(p)
        return h

    mi = 0.0
    for tv in t_values:
        for pv in p_values:
            joint = sum(1 for a, b in zip(truth, pred) if a == tv and b == pv) / n
            if joint > 0:
                pa = sum(1 for a in truth if a == tv) / n
                pb = sum(1 for b in pred if b == pv) / n
                mi += joint * math.log(joint / (pa * pb))
    denom = 0.5 * (entropy(truth, t_values) + entropy(pred, p_values))
    if denom == 0.0:
        return 0.0
    return mi / denom


def ari_reference(truth, pred):
    """Adjusted Rand index by enumerating every pair of elements."""
    truth = list(truth)
    pred = list(pred)
    n = len(truth)
    both = 0  # together in both partitions
    t_only = 0
    p_only = 0
    neither = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_t = truth[i] == truth[j]
            same_p = pred[i] == pred[j]
            if same_t and same_p:
                both += 1
            elif same_t:
                t_only += 1
            elif same_p:
                p_only += 1
            else:
                neither += 1
    a, b, c, d = both, t_only, p_only, neither
    total = a + b + c + d
    if total == 0:
        return 1.0
    expected = (a + b) * (a + c) / total
    max_index = 0.5 * ((a + b) + (a + c))
    if max_index == expected:
        return 1.0 if a == expected else 0.0
    return (a - expected) / (max_index - expected)


def all_partitions(n):
    """Every partition of range(n) as a label vector (Bell-number many)."""
    if n == 0:
        return [[]]
    out = []

    def extend(labels, next_label):
        idx = len(labels)
        if idx == n:
            out.append(list(labels))
            return
        for lab in range(next_label):
            labels.append(lab)
            extend(labels, next_label)
            labels.pop()
        labels.append(next_label)
        extend(labels, next_label + 1)
        labels.pop()

    extend([], 0)
    return out
