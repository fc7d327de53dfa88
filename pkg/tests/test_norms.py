import itertools
import math

import numpy as np
import pytest
from scipy import optimize

from sqrtreg import (
    BoxCone,
    ComplementNorm,
    DimensionError,
    DisallowedSetError,
    GroupNorm,
    L1Norm,
    ScaledNorm,
    SortedL1Norm,
    SparseGroupNorm,
    StructuredNorm,
    WedgeCone,
    complement_norm_value,
    dual_norm,
    ell2_comparison_constant,
    norm_from_config,
    norm_value,
    prox,
)
from sqrtreg.norms import _pava_decreasing


def spec_zoo(p):
    """One instance of every variant on dimension p (groups need p >= 4)."""
    groups = [list(range(0, 2)), list(range(2, p - 1)), [p - 1]]
    return {
        "l1": L1Norm(),
        "group": GroupNorm(groups),
        "sorted-l1": SortedL1Norm(np.linspace(2.0, 0.4, p)),
        "sparse-group": SparseGroupNorm(0.7, 1.3, groups),
        "box": StructuredNorm(BoxCone(np.full(p, 0.5), np.full(p, 2.5))),
        "wedge": StructuredNorm(WedgeCone()),
    }


def random_allowed_set(rng, name, p):
    if name == "wedge":
        return tuple(range(rng.integers(0, p + 1)))
    if name == "box":
        return tuple(range(p)) if rng.uniform() < 0.5 else ()
    if name == "group":
        groups = [list(range(0, 2)), list(range(2, p - 1)), [p - 1]]
        return tuple(sorted(i for g in groups if rng.uniform() < 0.5 for i in g))
    k = int(rng.integers(0, p + 1))
    return tuple(sorted(rng.choice(p, size=k, replace=False)))


# ---------------------------------------------------------------------------
# values
# ---------------------------------------------------------------------------


def test_l1_value():
    assert norm_value(L1Norm(), np.array([1.0, -2.0, 3.0])) == 6.0


def test_sorted_l1_value():
    spec = SortedL1Norm([3.0, 2.0, 1.0])
    assert spec.value(np.array([1.0, 0.0, 2.0])) == pytest.approx(3 * 2 + 2 * 1)


def test_group_value():
    spec = GroupNorm([[0], [1, 2]])
    assert spec.value(np.array([1.0, 3.0, 4.0])) == pytest.approx(1 + math.sqrt(2) * 5)


def test_wedge_value_against_grid_oracle():
    rng = np.random.default_rng(0)
    wedge = StructuredNorm(WedgeCone())
    grid = np.geomspace(1e-3, 30.0, 80)
    for _ in range(8):
        b = rng.standard_normal(3) * rng.uniform(0.5, 3)
        best = np.inf
        for a1 in grid:
            for a2 in grid[grid <= a1]:
                for a3 in grid[grid <= a2]:
                    a = np.array([a1, a2, a3])
                    best = min(best, 0.5 * float(np.sum(b * b / a + a)))
        ours = wedge.value(b)
        assert ours <= best + 1e-9
        assert ours == pytest.approx(best, rel=5e-3)


def test_box_value_against_grid_oracle():
    rng = np.random.default_rng(1)
    cone = BoxCone([0.5, 1.0], [2.0, 3.0])
    box = StructuredNorm(cone)
    for _ in range(8):
        b = rng.standard_normal(2) * 3
        best = np.inf
        for t in np.geomspace(1e-3, 100, 300):
            for a1 in np.linspace(0.5, 2.0, 40):
                for a2 in np.linspace(1.0, 3.0, 40):
                    c = t * np.array([a1, a2])
                    best = min(best, 0.5 * float(np.sum(b * b / c + c)))
        ours = box.value(b)
        assert ours <= best + 1e-9
        assert ours == pytest.approx(best, rel=5e-3)


def test_norm_axioms():
    rng = np.random.default_rng(2)
    p = 6
    for name, spec in spec_zoo(p).items():
        for _ in range(60):
            a, b = rng.standard_normal(p) * 2, rng.standard_normal(p) * 2
            c = float(rng.uniform(-3, 3))
            va, vb = spec.value(a), spec.value(b)
            assert spec.value(a + b) <= va + vb + 1e-10, name
            assert spec.value(c * a) == pytest.approx(abs(c) * va, rel=1e-10, abs=1e-10), name
            assert va > 0
        assert spec.value(np.zeros(p)) == 0.0, name


# ---------------------------------------------------------------------------
# duals
# ---------------------------------------------------------------------------


def test_l1_dual_is_sup_norm():
    assert dual_norm(L1Norm(), np.array([1.0, -2.0, 3.0])) == 3.0


def test_sorted_l1_dual_two_term():
    spec = SortedL1Norm([2.0, 1.0])
    assert spec.dual(np.array([3.0, 1.0])) == pytest.approx(max(3 / 2, 4 / 3))


def test_group_dual_formula():
    spec = GroupNorm([[0, 1], [2]])
    z = np.array([3.0, 4.0, 2.0])
    assert spec.dual(z) == pytest.approx(max(5 / math.sqrt(2), 2.0))


def test_dual_dominates_random_ratios():
    rng = np.random.default_rng(3)
    p = 6
    for name, spec in spec_zoo(p).items():
        for _ in range(1000):
            z = rng.standard_normal(p) * 2
            b = rng.standard_normal(p) * 2
            assert spec.dual(z) >= float(z @ b) / spec.value(b) - 1e-10, name


def test_generalized_cauchy_schwarz():
    rng = np.random.default_rng(4)
    p = 6
    for name, spec in spec_zoo(p).items():
        for _ in range(1000):
            z, b = rng.standard_normal(p), rng.standard_normal(p)
            assert float(z @ b) <= spec.dual(z) * spec.value(b) + 1e-10, name


def test_box_dual_matches_vertex_enumeration():
    rng = np.random.default_rng(5)
    cone = BoxCone([0.5, 1.0, 0.8], [2.0, 3.0, 1.6])
    for _ in range(25):
        z = rng.standard_normal(3) * 2
        best = max(
            float(np.array(v) @ (z * z) / np.sum(v))
            for v in itertools.product(*zip(cone.lower, cone.upper))
        )
        assert cone.dual_value(z) == pytest.approx(math.sqrt(best), rel=1e-12)


def test_wedge_dual_matches_prefix_enumeration():
    rng = np.random.default_rng(6)
    cone = WedgeCone()
    for _ in range(25):
        z = rng.standard_normal(5)
        best = max(np.sum(z[: k + 1] ** 2) / (k + 1) for k in range(5))
        assert cone.dual_value(z) == pytest.approx(math.sqrt(best), rel=1e-12)


# ---------------------------------------------------------------------------
# prox
# ---------------------------------------------------------------------------


def test_l1_prox_soft_threshold():
    out = prox(L1Norm(), np.array([3.0, -0.5]), 1.0)
    np.testing.assert_allclose(out, [2.0, 0.0])


def test_prox_at_zero_is_zero():
    for name, spec in spec_zoo(5).items():
        np.testing.assert_array_equal(prox(spec, np.zeros(5), 0.7), np.zeros(5)), name


def test_prox_rejects_nonpositive_step():
    with pytest.raises(ValueError):
        prox(L1Norm(), np.ones(3), 0.0)


def test_sorted_l1_prox_small_case_grid_oracle():
    spec = SortedL1Norm([2.0, 1.0])
    v = np.array([3.0, 3.0])
    ours = spec.prox(v, 1.0)

    def objective(b):
        return 0.5 * np.sum((b - v) ** 2) + spec.value(b)

    # dense grid plus local refinement
    grid = np.linspace(-0.5, 3.5, 161)
    best, arg = np.inf, None
    for b1 in grid:
        for b2 in grid:
            val = objective(np.array([b1, b2]))
            if val < best:
                best, arg = val, np.array([b1, b2])
    refined = optimize.minimize(objective, arg, method="Powell",
                                options={"xtol": 1e-12, "ftol": 1e-14}).fun
    assert objective(ours) <= refined + 1e-5
    np.testing.assert_allclose(ours, [1.5, 1.5], atol=1e-12)


def test_prox_objective_matches_powell_oracle():
    rng = np.random.default_rng(7)
    p = 5
    for name, spec in spec_zoo(p).items():
        for _ in range(10):
            v = rng.standard_normal(p) * 3
            s = float(rng.uniform(0.1, 2.0))
            ours = spec.prox(v, s)

            def objective(b):
                return 0.5 * np.sum((b - v) ** 2) + s * spec.value(b)

            oracle = min(
                optimize.minimize(objective, x0, method="Powell",
                                  options={"xtol": 1e-10, "ftol": 1e-12, "maxiter": 30000}).fun
                for x0 in (v, np.zeros(p), rng.standard_normal(p))
            )
            assert objective(ours) <= oracle + 1e-5, name


def test_prox_beats_random_perturbations():
    rng = np.random.default_rng(8)
    p = 6
    for name, spec in spec_zoo(p).items():
        v = rng.standard_normal(p) * 2
        s = 0.8
        out = spec.prox(v, s)

        def objective(b):
            return 0.5 * np.sum((b - v) ** 2) + s * spec.value(b)

        base = objective(out)
        scales = rng.choice([1e-4, 1e-2, 1e-1, 1.0], size=10000)
        perturbations = out[None, :] + rng.standard_normal((10000, p)) * scales[:, None]
        vals = 0.5 * np.sum((perturbations - v) ** 2, axis=1) + s * spec.value_many(perturbations)
        assert np.all(vals >= base - 1e-10), name


def test_pava_fast_path_matches_python_reference():
    rng = np.random.default_rng(9)

    def reference(d):
        sums, counts = [], []
        for x in d:
            s, c = float(x), 1
            while sums and sums[-1] * c <= s * counts[-1]:
                s += sums.pop()
                c += counts.pop()
            sums.append(s)
            counts.append(c)
        out = np.empty_like(d)
        start = 0
        for s, c in zip(sums, counts):
            out[start:start + c] = s / c
            start += c
        return out

    for _ in range(200):
        d = rng.standard_normal(rng.integers(1, 50))
        np.testing.assert_allclose(_pava_decreasing(d), reference(d), atol=1e-12)


# ---------------------------------------------------------------------------
# complements and weak decomposability
# ---------------------------------------------------------------------------


def test_l1_complement_is_l1():
    cn = ComplementNorm(L1Norm(), (0, 2), 4)
    assert complement_norm_value(cn, np.array([5.0, -1.0])) == 6.0


def test_sorted_l1_complement_uses_smallest_weights():
    cn = ComplementNorm(SortedL1Norm([3.0, 2.0, 1.0]), (0,), 3)
    assert cn.value(np.array([5.0, 1.0])) == pytest.approx(2 * 5 + 1 * 1)


def test_group_complement_requires_whole_groups():
    spec = GroupNorm([[0, 1], [2, 3]])
    ComplementNorm(spec, (0, 1), 4)
    with pytest.raises(DisallowedSetError, match="splits group"):
        ComplementNorm(spec, (0,), 4)


def test_wedge_complement_requires_prefix():
    spec = StructuredNorm(WedgeCone())
    ComplementNorm(spec, (0, 1), 5)
    with pytest.raises(DisallowedSetError, match="prefix"):
        ComplementNorm(spec, (1, 2), 5)


def test_box_rejects_proper_subsets():
    spec = StructuredNorm(BoxCone(np.full(4, 0.5), np.full(4, 2.0)))
    ComplementNorm(spec, (), 4)
    ComplementNorm(spec, (0, 1, 2, 3), 4)
    with pytest.raises(DisallowedSetError, match="box"):
        ComplementNorm(spec, (0, 1), 4)


def test_sparse_group_complement_is_scaled_l1():
    spec = SparseGroupNorm(0.7, 1.3, [[0, 1], [2, 3]])
    cn = ComplementNorm(spec, (1, 3), 4)
    assert isinstance(cn.norm, ScaledNorm)
    assert cn.value(np.array([2.0, -1.0])) == pytest.approx(0.7 * 3)


def test_sparse_group_zero_l1_weight_has_no_complement():
    spec = SparseGroupNorm(0.0, 1.0, [[0, 1], [2, 3]])
    with pytest.raises(DisallowedSetError, match="l1_weight"):
        ComplementNorm(spec, (0,), 4)


def test_weak_decomposability_all_norms():
    rng = np.random.default_rng(10)
    p = 6
    for name, spec in spec_zoo(p).items():
        worst = np.inf
        for _ in range(1000):
            beta = rng.standard_normal(p) * 2
            S = random_allowed_set(rng, name, p)
            cn = ComplementNorm(spec, S, p)
            beta_s = np.zeros(p)
            if S:
                beta_s[list(S)] = beta[list(S)]
            rest = [i for i in range(p) if i not in S]
            slack = spec.value(beta) - spec.value(beta_s) - cn.value(beta[rest])
            worst = min(worst, slack)
        assert worst >= -1e-10, name


def test_l1_decomposes_exactly():
    rng = np.random.default_rng(11)
    spec = L1Norm()
    for _ in range(300):
        beta = rng.standard_normal(6)
        S = tuple(sorted(rng.choice(6, size=3, replace=False)))
        cn = ComplementNorm(spec, S, 6)
        beta_s = np.zeros(6)
        beta_s[list(S)] = beta[list(S)]
        rest = [i for i in range(6) if i not in S]
        assert spec.value(beta) == pytest.approx(
            spec.value(beta_s) + cn.value(beta[rest]), abs=1e-12
        )


def test_rearrangement_brute_force():
    rng = np.random.default_rng(12)
    for p in range(2, 8):
        for _ in range(3):
            beta = np.sort(rng.uniform(0, 3, p))[::-1]
            lam = np.sort(rng.uniform(0.1, 2, p))[::-1]
            identity_value = float(lam @ beta)
            best = max(
                float(lam @ beta[list(perm)]) for perm in itertools.permutations(range(p))
            )
            assert identity_value == pytest.approx(best, rel=1e-12)


def test_complement_norm_dimension_check():
    cn = ComplementNorm(L1Norm(), (0,), 3)
    with pytest.raises(DimensionError):
        cn.value(np.ones(3))


# ---------------------------------------------------------------------------
# l2-comparison constants
# ---------------------------------------------------------------------------


def test_ell2_constants_closed_forms():
    assert ell2_comparison_constant(L1Norm()) == 1.0
    assert ell2_comparison_constant(GroupNorm([[0, 1], [2]])) == 1.0
    assert ell2_comparison_constant(SortedL1Norm([1.0, 0.5, 0.1])) == pytest.approx(10.0)
    assert ell2_comparison_constant(SparseGroupNorm(0.5, 1.0, [[0], [1]])) == pytest.approx(2.0)
    assert ell2_comparison_constant(SparseGroupNorm(0.0, 0.5, [[0], [1]])) == pytest.approx(2.0)
    assert ell2_comparison_constant(StructuredNorm(WedgeCone())) == 1.0


def test_ell2_constants_validated_by_sampling():
    rng = np.random.default_rng(13)
    p = 6
    for name, spec in spec_zoo(p).items():
        D = ell2_comparison_constant(spec)
        for _ in range(1000):
            b = rng.standard_normal(p) * rng.uniform(0.1, 10)
            assert np.linalg.norm(b) <= D * spec.value(b) * (1 + 1e-10), name


# ---------------------------------------------------------------------------
# construction and serialization
# ---------------------------------------------------------------------------


def test_invalid_constructions():
    with pytest.raises(ValueError, match="nonincreasing"):
        SortedL1Norm([1.0, 2.0])
    with pytest.raises(ValueError, match="positive"):
        SortedL1Norm([1.0, 0.0])
    with pytest.raises(ValueError, match="partition"):
        GroupNorm([[0, 1], [1, 2]])
    with pytest.raises(ValueError, match="partition"):
        GroupNorm([[0], [2]])
    with pytest.raises(ValueError):
        SparseGroupNorm(0.0, 0.0, [[0]])
    with pytest.raises(ValueError, match="lower"):
        BoxCone([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        BoxCone([2.0], [1.0])


def test_config_roundtrip():
    for name, spec in spec_zoo(5).items():
        back = norm_from_config(spec.to_config())
        v = np.array([0.3, -1.2, 2.0, 0.0, -0.4])
        assert back.value(v) == pytest.approx(spec.value(v), rel=1e-14), name
        assert back.dual(v) == pytest.approx(spec.dual(v), rel=1e-14), name
