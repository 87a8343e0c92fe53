import itertools

import numpy as np
import pytest

from cayleygraph import catalog
from cayleygraph.calibration import (OMEGA, OMEGA_PRIME, calibration_defect, evaluate_form,
                                     form_tensor, omega_triangle, omega_triangle_frames)
from cayleygraph.errors import FrameDegenerate
from cayleygraph.jets import random_polynomial_spec

from conftest import sample_points

E8 = np.eye(8)


def _on(form, *idx):
    return evaluate_form(form, *(E8[i - 1] for i in idx))


@pytest.mark.parametrize("form", [OMEGA, OMEGA_PRIME], ids=["Omega", "OmegaPrime"])
def test_fourteen_unit_terms(form):
    terms = form.nonzero()
    assert len(terms) == 14
    assert all(abs(c) == 1.0 for c in terms.values())
    assert _on(form, 1, 2, 3, 4) == 1.0 and _on(form, 5, 6, 7, 8) == 1.0
    assert _on(form, 1, 2, 5, 6) == 1.0


def test_forms_differ_only_in_signs():
    a, b = OMEGA.nonzero(), OMEGA_PRIME.nonzero()
    assert set(a) == set(b)
    assert a != b


@pytest.mark.parametrize("form", [OMEGA, OMEGA_PRIME], ids=["Omega", "OmegaPrime"])
def test_antisymmetry(form, rng):
    v = list(rng.normal(size=(4, 8)))
    base = evaluate_form(form, *v)
    for perm in itertools.permutations(range(4)):
        sign = np.linalg.det(np.eye(4)[list(perm)])
        assert evaluate_form(form, *(v[i] for i in perm)) == pytest.approx(sign * base, abs=1e-12)
    assert evaluate_form(form, v[0], v[0], v[1], v[2]) == pytest.approx(0, abs=1e-12)
    T = form_tensor(form)
    assert np.array_equal(T, -T.transpose(1, 0, 2, 3))
    assert np.array_equal(T, -T.transpose(0, 2, 1, 3))


@pytest.mark.parametrize("form", [OMEGA, OMEGA_PRIME], ids=["Omega", "OmegaPrime"])
def test_comass_at_most_one(form, rng):
    frames, _ = np.linalg.qr(rng.normal(size=(20000, 8, 4)))
    values = np.einsum("abcd,na,nb,nc,nd->n", form_tensor(form), frames[:, :, 0], frames[:, :, 1],
                       frames[:, :, 2], frames[:, :, 3], optimize=True)
    assert values.max() <= 1.0 + 1e-9
    assert values.min() >= -1.0 - 1e-9


def test_zero_map_is_calibrated_by_both():
    spec = catalog.build("zero")
    for variant in ("Omega", "OmegaPrime"):
        assert calibration_defect(spec, [0.1, 0.2, 0.3, 0.4], variant) == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("entry_id", ["cayley-sin-sinh", "j-plus-quadratic-1", "j-plus-quadratic-2"])
def test_cayley_examples_calibrated(entry_id, rng):
    spec = catalog.build(entry_id)
    for p in sample_points(entry_id, rng, 15):
        assert abs(calibration_defect(spec, p)) <= 1e-9


def test_random_polynomial_not_calibrated(rng):
    spec = random_polynomial_spec(rng, degree=3)
    worst = max(abs(calibration_defect(spec, rng.uniform(-1, 1, 4))) for _ in range(10))
    assert worst > 1e-3


def test_standard_frames_triangle():
    M = omega_triangle_frames(E8[:, :4], E8[:, 4:], "Omega")
    assert np.allclose(M, np.diag([1.0, 1.0, -1.0]), atol=1e-14)
    assert np.allclose(omega_triangle_frames(E8[:, :4], E8[:, 4:], "OmegaPrime"), np.eye(3), atol=1e-14)


def test_zero_map_triangle_orientations():
    spec = catalog.build("zero")
    p = [0.3, -0.2, 0.1, 0.5]
    assert np.allclose(omega_triangle(spec, p, "Omega"), -np.eye(3), atol=1e-14)
    M = omega_triangle(spec, p, "OmegaPrime")
    assert np.allclose(M @ M.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(M) == pytest.approx(1.0)


@pytest.mark.parametrize("entry_id", ["cayley-sin-sinh", "j-plus-quadratic-1", "j-plus-quadratic-2"])
def test_triangle_orthogonal_reversing(entry_id, rng):
    spec = catalog.build(entry_id)
    for p in sample_points(entry_id, rng, 5):
        M = omega_triangle(spec, p)
        assert np.abs(M @ M.T - np.eye(3)).max() <= 1e-9
        assert np.linalg.det(M) == pytest.approx(-1.0, abs=1e-9)


def test_triangle_undefined_at_complex_point():
    with pytest.raises(FrameDegenerate):
        omega_triangle(catalog.build("j-plus-quadratic-1"), [0, 0, 0, 0])
