import cmath
import math

import numpy as np
from hypothesis import assume, given, settings, strategies as st

from pointer_ideality.grid import (
    Wavefunction,
    abs_overlap,
    apply_linear_phase,
    auto_grid,
    inner_product,
    make_grid,
    normalize,
    translate,
)
from pointer_ideality.measurement import QubitState, povm_elements, povm_probabilities
from pointer_ideality.measures import (
    error_measure,
    faithfulness_certificate,
    formal_overlap,
    gaussian_closed_forms,
    lagrangian_objective,
    operational_overlap,
)
from pointer_ideality.pointers import (
    FaithfulParams,
    GaussianParams,
    faithful_post_states,
    gaussian_envelope,
    gaussian_post,
)

GRID = make_grid(-10.0, 10.0, 1001)
PROFILE = settings(max_examples=60, deadline=None)

component = st.tuples(
    st.floats(-4, 4),  # center
    st.floats(0.4, 1.5),  # width
    st.floats(-3, 3),  # wavenumber
    st.floats(-0.5, 0.5),  # chirp
    st.floats(0.1, 1.0),  # weight
    st.floats(-math.pi, math.pi),  # phase
)


@st.composite
def pointers(draw):
    x = GRID.x
    amp = np.zeros(GRID.n, dtype=complex)
    for c, w, k, chirp, a, phi in draw(st.lists(component, min_size=1, max_size=3)):
        amp += a * np.exp(-((x - c) ** 2) / (4 * w**2) + 1j * (k * x + chirp * x**2 + phi))
    return normalize(Wavefunction(GRID, amp))


@PROFILE
@given(pointers(), pointers())
def test_conjugate_symmetry(a, b):
    assert abs(inner_product(a, b) - np.conj(inner_product(b, a))) < 1e-12


@PROFILE
@given(pointers(), pointers())
def test_overlap_ordering(a, b):
    abs_i, m = abs(formal_overlap(a, b)), operational_overlap(a, b)
    assert abs_i <= m + 1e-12
    assert m <= 1 + 1e-10


@PROFILE
@given(pointers(), st.integers(-150, 150), st.floats(-5, 5))
def test_norm_preserving_maps(psi, steps, k):
    assume(abs(steps) * GRID.h < 3)
    moved = translate(psi, steps * GRID.h, strict=False)
    if max(abs(psi.density[:160]).max(), abs(psi.density[-160:]).max()) < 1e-20:
        assert abs(moved.norm() - 1) < 1e-10
    assert abs(apply_linear_phase(psi, k).norm() - 1) < 1e-12


@PROFILE
@given(pointers(), st.floats(0, 0.3), st.floats(0.3, 3.0))
def test_lagrangian_nonpositive(psi, theta, s_nodes):
    s = round(s_nodes / GRID.h) * GRID.h
    assert lagrangian_objective(psi, FaithfulParams(-0.5, theta, s), 0.0).value <= 1e-12


@PROFILE
@given(
    st.floats(0.3, 2.0),
    st.floats(0.0, 3.0),
    st.floats(0.0, 3.0),
)
def test_gaussian_closed_forms_match_quadrature(sigma0, g, t):
    p = GaussianParams(sigma0, g, t)
    grid = auto_grid(p.center, p.sigma_t, wavenumber=p.effective_wavenumber)
    plus, minus = gaussian_post(p, grid)
    abs_i, m, _ = gaussian_closed_forms(p)
    assert abs(abs(formal_overlap(plus, minus)) - abs_i) < 1e-9
    assert abs(operational_overlap(plus, minus) - m) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 1.5), st.floats(0.2, 1.0), st.floats(0.2, 1.5))
def test_simpson_converges_under_refinement(sigma0, g, t):
    p = GaussianParams(sigma0, g, t)
    abs_i = gaussian_closed_forms(p)[0]
    errors = []
    for n in (161, 321, 641):
        plus, minus = gaussian_post(p, make_grid(-12, 12, n), strict=False)
        errors.append(abs(abs(formal_overlap(plus, minus)) - abs_i))
    assert errors[2] <= max(errors[1], 1e-12) and errors[1] <= max(errors[0], 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 1.5), st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0.1, 1.0))
def test_error_measure_monotone_in_coupling(sigma0, t, g, dg):
    def e(coupling):
        p = GaussianParams(sigma0, coupling, t)
        return error_measure(*gaussian_post(p, make_grid(-16, 16, 3201), strict=False))

    assert e(g + dg) <= e(g) + 1e-12
    assert 0 <= e(g) <= 0.5 + 1e-9


@PROFILE
@given(st.floats(0.0, 0.5), st.floats(0.0, 1.0), st.floats(-math.pi, math.pi))
def test_povm_valid(E, p_up, phase):
    pair = povm_elements(E)
    for op in (pair.pi_plus, pair.pi_minus):
        assert np.linalg.eigvalsh(op).min() >= -1e-12
    p_plus, p_minus = povm_probabilities(QubitState.from_up_probability(p_up, phase), pair)
    assert 0 <= p_plus <= 1 and abs(p_plus + p_minus - 1) < 1e-12
    assert abs(p_plus - ((1 - E) * p_up + E * (1 - p_up))) < 1e-12


@PROFILE
@given(pointers(), pointers())
def test_certificate_sound(a, b):
    ok, _ = faithfulness_certificate(a, b)
    if ok:
        assert operational_overlap(a, b) - abs(formal_overlap(a, b)) <= 1e-6


@PROFILE
@given(pointers(), st.floats(-math.pi, math.pi), st.floats(0.2, 3.0))
def test_certificate_complete(psi, phi, scale):
    # conj(psi_+) psi_- = exp(i phi) times a positive profile
    modulus = np.abs(psi.amplitudes)
    profile = np.exp(-((GRID.x / (2 * scale)) ** 2))
    other = normalize(psi.with_amplitudes(psi.amplitudes * profile * cmath.exp(1j * phi)))
    assume(np.min(modulus[np.abs(GRID.x) < 3]) > 1e-3 * modulus.max())
    ok, dev = faithfulness_certificate(psi, other)
    assert dev < 1e-9
    assert ok


@PROFILE
@given(st.floats(0.0, 1.0), st.floats(-1.5, 1.5), st.integers(10, 60))
def test_faithful_family_overlaps(tilt, theta, s_nodes):
    grid = make_grid(-12, 12, 2401)
    s = s_nodes * grid.h
    plus, minus = faithful_post_states(gaussian_envelope(grid, 0.8), FaithfulParams.from_tilt(tilt, theta, s), strict=False)
    i = formal_overlap(plus, minus)
    assert abs(operational_overlap(plus, minus) - 1) < 1e-8
    assert abs(abs(i) - 1) < 1e-8
    assert abs(cmath.exp(1j * cmath.phase(i)) - cmath.exp(4j * s * theta)) < 1e-8
