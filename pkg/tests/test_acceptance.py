"""Exit criteria of the package, one test per criterion (some split by case).

A summary line per criterion is printed at the end of the pytest run.
"""

import itertools
import math

import numpy as np
import pytest

from langmuir_bd import (
    LigParams,
    ModelSpec,
    PhysicalParams,
    boundary_masses,
    delta_infinity,
    delta_n,
    lemma2_limit,
    lemma2_partial_sum,
    lig_cdf,
    lig_moment,
    lig_pi,
    limit_law_for,
    lower_incomplete_gamma,
    scaled_moments,
    stationary_pmf,
)
from langmuir_bd.convergence import kolmogorov_distance
from langmuir_bd.limits import gamma_steady_state
from langmuir_bd.simulate import (
    euler_maruyama,
    gillespie_run,
    occupation_pmf,
    required_run_time,
    sde_ks,
    total_variation,
)
from oracles import dense_stationary, incgamma_quad

MODELS = ("M1", "M2", "M3")
CONSTS = list(itertools.product([0.5, 1, 2], repeat=3))
DYADIC = (250, 500, 1000, 2000, 4000)
PI_12 = 2 / (1 + math.e**2)

# Frozen from an independent scipy-based run (scipy.special.gammainc for the
# limit law, direct cumulative products for the pmf) at N = 4000, c1=c2=c3=1.
KS_M1_4000 = 4.394404742834e-4
ATOM_M1_4000 = 6.925713144906e-5


def strictly_decreasing(values):
    return all(a > b for a, b in zip(values, values[1:]))


def fmt(values):
    return "[" + ", ".join(f"{v:.3g}" for v in values) + "]"


@pytest.mark.criterion(1, "exact solver equals dense global-balance solve (N <= 12)")
def test_c01_dense_equivalence(record_property):
    worst = 0.0
    for model, consts, N in itertools.product(MODELS, CONSTS, range(1, 13)):
        spec = ModelSpec(model, *consts, N)
        worst = max(worst, np.abs(stationary_pmf(spec).probs - dense_stationary(spec)).max())
    record_property("detail", f"max abs diff {worst:.2e}")
    assert worst <= 1e-10


@pytest.mark.criterion(2, "exact-mean identity N E[Y_N] = c1 N / (c1 + c2)")
def test_c02_mean_identity(record_property):
    worst = 0.0
    for model, consts, N in itertools.product(MODELS, CONSTS, (5, 50, 500, 5000)):
        spec = ModelSpec(model, *consts, N)
        mean = N * scaled_moments(stationary_pmf(spec), 1).raw[1]
        target = spec.c1 * N / (spec.c1 + spec.c2)
        worst = max(worst, abs(mean - target) / target)
    record_property("detail", f"max rel err {worst:.2e}")
    assert worst <= 1e-10


@pytest.mark.criterion(3, "M1 converges to LIG(1,2)")
def test_c03_m1_lig(record_property):
    law = limit_law_for("M1", 1, 2)
    assert law.atom[1] == pytest.approx(PI_12, rel=1e-14)
    ks, atom = [], []
    for N in DYADIC:
        pmf = stationary_pmf(ModelSpec("M1", 1, 1, 1, N))
        ks.append(kolmogorov_distance(pmf, law))
        atom.append(abs(pmf.probs[-1] - PI_12))
    record_property("detail", f"ks {fmt(ks)}, atom err {fmt(atom)}")
    assert strictly_decreasing(ks)
    assert strictly_decreasing(atom)
    assert ks[-1] == pytest.approx(KS_M1_4000, rel=0.2)
    assert atom[-1] == pytest.approx(ATOM_M1_4000, rel=0.2)


@pytest.mark.criterion(4, "M2 converges via reflection; M2 pmf mirrors M1 with c1<->c2")
def test_c04_m2_reflection(record_property):
    law = limit_law_for("M2", 1, 2)
    assert law.atom == pytest.approx((0.0, PI_12), rel=1e-14)
    atom, ks = [], []
    for N in DYADIC:
        pmf = stationary_pmf(ModelSpec("M2", 1, 1, 1, N))
        atom.append(abs(pmf.probs[0] - PI_12))
        ks.append(kolmogorov_distance(pmf, law))
    assert strictly_decreasing(atom)
    assert strictly_decreasing(ks)
    worst = 0.0
    for consts, N in itertools.product(CONSTS, (1, 2, 7, 100, 1000)):
        c1, c2, c3 = consts
        p2 = stationary_pmf(ModelSpec("M2", c1, c2, c3, N)).probs
        p1 = stationary_pmf(ModelSpec("M1", c2, c1, c3, N)).probs
        worst = max(worst, np.abs(p2 - p1[::-1]).max())
    record_property("detail", f"atom err {fmt(atom)}, mirror diff {worst:.1e}")
    assert worst <= 1e-12


@pytest.mark.criterion(5, "M3 converges to Beta(1,1)")
def test_c05_m3_beta(record_property):
    law = limit_law_for("M3", 1, 2)
    assert float(law.cdf_left(1.0)) == pytest.approx(1.0, abs=1e-12)
    grid = DYADIC + (8000,)
    targets = [1 / 2, 1 / 3, 1 / 4, 1 / 5]
    errs = []
    for N in grid:
        pmf = stationary_pmf(ModelSpec("M3", 1, 1, 1, N))
        assert kolmogorov_distance(pmf, law) <= 2 / (N + 1)
        raw = scaled_moments(pmf, 4).raw[1:]
        errs.append(np.abs(raw - targets))
    errs = np.array(errs)
    record_property("detail", f"m2..m4 err at N=8000 {fmt(errs[-1, 1:])}")
    assert np.all(errs[:, 0] <= 1e-10)
    for m in range(1, 4):
        assert strictly_decreasing(errs[:, m])


@pytest.mark.criterion(6, "Delta_N identity and convergence to b^a / ((b-a) e^b G(a,b))")
@pytest.mark.parametrize("consts", [(1, 1, 1), (2, 3, 1)])
def test_c06_delta(consts, record_property):
    grid = DYADIC + (8000,)
    errs = []
    for N in grid:
        spec = ModelSpec("M1", *consts, N)
        d = delta_n(spec)
        assert d / (1 + d) == pytest.approx(boundary_masses(stationary_pmf(spec))[1], abs=1e-12)
        errs.append(abs(d - delta_infinity(spec.a, spec.b)))
    record_property("detail", f"(a,b)=({consts[0] / consts[2]:g},{sum(consts[:2]) / consts[2]:g}) err {fmt(errs)}")
    assert strictly_decreasing(errs)


@pytest.mark.criterion(7, "moment recursion residuals and partial-sum convergence")
def test_c07_lemmas(record_property):
    worst = 0.0
    for alpha, beta in [(1, 2), (0.5, 1.5), (2, 5)]:
        p = LigParams(alpha, beta)
        pi = lig_pi(p)
        mu = [lig_moment(p, m) for m in range(17)]
        for m in range(16):
            worst = max(worst, abs(mu[m + 1] - (m + alpha) / beta * mu[m] + m / beta * pi))
    target = 1 - math.exp(-1)
    assert lemma2_limit(1, 1) == pytest.approx(target, rel=1e-14)
    errs = [abs(lemma2_partial_sum(1, 1, N) - target) for N in (10**2, 10**3, 10**4, 10**5)]
    record_property("detail", f"max residual {worst:.1e}, sum err {fmt(errs)}")
    assert worst <= 1e-12
    assert strictly_decreasing(errs)


@pytest.mark.criterion(8, "Gillespie occupation law within TV 0.02 of the exact law")
@pytest.mark.parametrize("model", ["M1", "M3"])
def test_c08_gillespie(model, record_property):
    spec = ModelSpec(model, 1, 1, 1, 100)
    exact = stationary_pmf(spec)
    # 1e4 expected entries per state (>= 1e3 required)
    t_max = required_run_time(spec, 10_000)
    tvs = []
    for seed in (101, 202, 303):
        traj = gillespie_run(spec, 50, t_max, seed, max_events=0)
        tvs.append(total_variation(occupation_pmf(traj), exact))
    record_property("detail", f"{model} tv {fmt(tvs)}")
    assert max(tvs) <= 0.02


@pytest.mark.criterion(9, "Euler-Maruyama stationary law vs gamma steady state")
def test_c09_sde(record_property):
    free = PhysicalParams(1, 1, 9, 2)
    g = gamma_steady_state(free)
    assert (g.shape, g.rate) == pytest.approx((1, 10))
    path = euler_maruyama(free, 0.1, 1e-3, 2000.0, seed=17)
    ks_free = sde_ks(path, g.cdf)
    lig_free = LigParams(1, 10)
    ks_free_lig = sde_ks(path, lambda x: lig_cdf(lig_free, x))
    assert ks_free <= 0.05
    assert ks_free_lig <= 0.05

    # (a, b) = (1, 2): the boundary-free law has no atom at 1, the LIG limit does
    bounded = PhysicalParams(1, 1, 1, 2)
    g2 = gamma_steady_state(bounded)
    path2 = euler_maruyama(bounded, 0.5, 1e-3, 2000.0, seed=18)
    ks_gamma = sde_ks(path2, g2.cdf)
    ks_lig = sde_ks(path2, lambda x: lig_cdf(LigParams(1, 2), x))
    above = float(np.mean(path2.values > 1))
    record_property(
        "detail",
        f"(1,10) ks {ks_free:.4f}; (1,2) ks vs gamma {ks_gamma:.4f}, vs LIG {ks_lig:.4f}, "
        f"P(u>1) {above:.3f} vs atom {PI_12:.3f}",
    )
    assert ks_gamma <= 0.05
    assert ks_lig > 0.1
    assert above == pytest.approx(math.exp(-2), abs=0.02)


@pytest.mark.criterion(10, "lower incomplete gamma vs quadrature and closed forms")
def test_c10_special(record_property):
    worst = 0.0
    for z, g in itertools.product((0.5, 1, 2.5, 10), (0.1, 1, 5, 20)):
        ref = incgamma_quad(z, g)
        worst = max(worst, abs(lower_incomplete_gamma(z, g) - ref) / ref)
    closed = [
        (1, 1, 1 - math.exp(-1)),
        (2, 1, 1 - 2 * math.exp(-1)),
        (0.5, 1, math.sqrt(math.pi) * math.erf(1)),
    ]
    worst_closed = max(abs(lower_incomplete_gamma(z, g) - v) for z, g, v in closed)
    record_property("detail", f"quad rel {worst:.1e}, closed-form abs {worst_closed:.1e}")
    assert worst <= 1e-10
    assert worst_closed <= 1e-10
