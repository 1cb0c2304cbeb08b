import math

import numpy as np
import pytest
from scipy.linalg import expm

import pathtransport as pt
from pathtransport.bundles import coeffs3_at
from pathtransport.errors import SpecFormatError
from pathtransport.laws import random_paths


def test_standard_catalog_ids(catalog):
    assert list(catalog) == ["flat", "sphere", "sphere-orthonormal", "evolution", "nonlinear"]


def test_get_entry_rejects_unknown():
    with pytest.raises(SpecFormatError):
        pt.get_entry("moebius")


# --- flat ----------------------------------------------------------------------


def test_flat_transport_is_identity_everywhere(flat_entry, rng):
    for path in random_paths(rng, 3, dim=2, box=flat_entry.chart_box):
        u = pt.FibreVector(path.at(0.2), rng.standard_normal(2))
        out = flat_entry.transport.apply(path, 0.2, 0.9, u)
        assert np.array_equal(out.components, u.components)


def test_flat_holonomy_is_identity(flat_entry):
    loop_path = pt.segment([0.0, 0.0], [1.0, 0.0])
    loop = pt.product_canonical(loop_path, pt.invert_canonical(loop_path))
    rep = pt.holonomy(flat_entry.transport, loop)
    assert rep.distance_to_identity == 0.0
    assert rep.angle == 0.0


def test_flat_dimensions_are_configurable():
    entry = pt.flat_bundle(3, 4)
    assert entry.geometry.base_dim == 3
    assert entry.geometry.fibre_dim == 4
    assert entry.geometry.coeffs3(np.zeros(3)).shape == (4, 4, 3)


# --- sphere (chart Christoffel symbols) ------------------------------------------


def test_sphere_christoffel_values(sphere_entry):
    g = sphere_entry.geometry
    at_equator = coeffs3_at(g, np.array([math.pi / 2, 0.0]))
    assert at_equator[0, 1, 1] == pytest.approx(0.0, abs=1e-15)  # -sin cos at pi/2
    at_quarter = coeffs3_at(g, np.array([math.pi / 4, 1.0]))
    assert at_quarter[1, 0, 1] == pytest.approx(1.0)  # cot(pi/4)
    assert at_quarter[1, 1, 0] == pytest.approx(1.0)
    assert at_quarter[0, 1, 1] == pytest.approx(-0.5)  # -sin cos at pi/4
    # everything else vanishes
    mask = np.zeros((2, 2, 2), dtype=bool)
    mask[0, 1, 1] = mask[1, 0, 1] = mask[1, 1, 0] = True
    assert np.all(at_quarter[~mask] == 0.0)


def test_sphere_factorizes(sphere_entry):
    v = pt.factorization_test(sphere_entry.transport, np.array([0.9, -0.4]), step=1e-3)
    assert v.factorizable and v.residual <= 1e-6


def test_orthonormal_frame_coefficients(ortho_entry):
    g = ortho_entry.geometry
    at = coeffs3_at(g, np.array([1.0, 0.3]))
    assert at[0, 1, 1] == pytest.approx(-math.cos(1.0))
    assert at[1, 0, 1] == pytest.approx(math.cos(1.0))
    assert at[0, 0, 0] == 0.0


def test_sphere_frames_agree_on_metric_invariants(sphere_entry, ortho_entry):
    # Same connection in two frames: latitude holonomy matrices are conjugate,
    # so their traces agree.
    lat = pt.latitude(0.8)
    m_chart = pt.holonomy(sphere_entry.transport, lat, step=1e-3).matrix
    m_ortho = pt.holonomy(ortho_entry.transport, lat, step=1e-3).matrix
    assert np.trace(m_chart) == pytest.approx(np.trace(m_ortho), abs=1e-9)


# --- evolution transport -----------------------------------------------------------


def test_zero_hamiltonian_is_flat():
    entry = pt.evolution_transport(np.zeros((2, 2)))
    seg = pt.segment([0.0], [1.0])
    u = pt.FibreVector([0.0], [1.0, 2.0])
    out = entry.transport.apply(seg, 0.0, 1.0, u)
    assert np.array_equal(out.components, u.components)
    assert entry.traits.flat and entry.traits.factorizable and entry.traits.parallel


def test_identity_hamiltonian_rotates_plane():
    # H = hbar * Id_C realified: L(t, s) is the plane rotation by -(t - s).
    entry = pt.evolution_transport(np.eye(2), 1.0)
    seg = pt.segment([0.0], [1.0])
    dt = 0.6
    m = entry.transport.matrix(seg, 0.1, 0.1 + dt).value
    j = pt.complex_structure(1)
    assert np.max(np.abs(m - expm(-dt * j))) <= 1e-14
    rot = np.array([[math.cos(dt), math.sin(dt)], [-math.sin(dt), math.cos(dt)]])
    assert np.max(np.abs(m - rot)) <= 1e-12


def test_generator_is_real_form_of_schroedinger_coefficients():
    # Complex coefficients -H/(i hbar) = (i/hbar) H realify to J H / hbar.
    rng = np.random.default_rng(1)
    h_c = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    h_c = h_c + h_c.conj().T  # hermitian
    hbar = 0.7
    gamma_c = h_c / (1j * hbar) * (-1.0)
    h_r = pt.realify_matrix(h_c)
    j = pt.complex_structure(2)
    assert np.allclose(pt.realify_matrix(gamma_c), j @ h_r / hbar)


def test_evolution_is_not_connection_generated(evolution_entry):
    v = pt.factorization_test(evolution_entry.transport, np.array([0.3]))
    assert not v.factorizable
    assert v.residual >= 0.5


def test_evolution_rejects_odd_dimension_or_bad_hbar():
    with pytest.raises(SpecFormatError):
        pt.evolution_transport(np.eye(3))
    with pytest.raises(SpecFormatError):
        pt.evolution_transport(np.eye(2), hbar=0.0)


# --- nonlinear fixture ----------------------------------------------------------------


def test_nonlinear_fixes_zero_section(nonlinear_entry):
    seg = pt.segment([0.0, 0.0], [1.0, 1.0])
    u = pt.FibreVector([0.0, 0.0], [0.0, 0.0])
    out = nonlinear_entry.transport.apply(seg, 0.0, 1.0, u)
    assert np.array_equal(out.components, [0.0, 0.0])


def test_zero_alpha_gives_flat_behavior():
    entry = pt.nonlinear_fixture(alpha=0.0)
    seg = pt.segment([0.0, 0.0], [1.0, 1.0])
    u = pt.FibreVector([0.0, 0.0], [1.5, -0.5])
    out = entry.transport.apply(seg, 0.0, 1.0, u)
    assert np.array_equal(out.components, u.components)


def test_nonlinear_flow_matches_closed_form(nonlinear_entry):
    # weights c = (1, 1/2): w = c . displacement
    seg = pt.segment([0.0, 0.0], [1.0, 0.5])
    u = np.array([1.0, 1.0])
    out = nonlinear_entry.transport.apply(seg, 0.0, 1.0, pt.FibreVector([0.0, 0.0], u))
    w = 1.0 + 0.5 * 0.5
    assert np.allclose(out.components, u / (1 - 0.1 * w * u))


# --- declared traits match measured verdicts --------------------------------------------


@pytest.mark.parametrize("entry_id", ["flat", "sphere", "sphere-orthonormal", "evolution", "nonlinear"])
def test_traits_match_measurements(catalog, entry_id, rng):
    entry = catalog[entry_id]
    transport = entry.transport
    path = random_paths(rng, 1, dim=transport.base_dim, box=entry.chart_box)[0]

    # groupoid laws hold for every entry
    assert pt.check_groupoid_laws(transport, path, samples=5, seed=1, step=1e-3).passed

    # linear <-> check_linearity verdict
    lin = pt.check_linearity(transport, path, 0.0, 1.0, seed=1, step=1e-3, tolerance=1e-9)
    assert lin.passed == entry.traits.linear

    # parallel <-> parametrization invariance (includes an orientation reversal)
    par = pt.check_parametrization_laws(transport, path, seed=1, step=1e-3)
    assert par.passed == entry.traits.parallel

    # factorizable <-> factorization verdict (linear realizations only)
    if transport.is_linear:
        center = np.array([0.5 * (a + b) for a, b in entry.chart_box])
        verdict = pt.factorization_test(transport, center, step=1e-3)
        assert verdict.factorizable == entry.traits.factorizable

    # flat <-> identity transport on a probe
    if entry.traits.flat:
        u = pt.FibreVector(path.at(0.0), rng.standard_normal(transport.fibre_dim))
        out = transport.apply(path, 0.0, 1.0, u)
        assert np.allclose(out.components, u.components)


# --- geometry specs ------------------------------------------------------------------------


def test_load_builtin_spec():
    entry = pt.load_geometry_spec("kind = builtin\nbuiltin_id = sphere\n")
    assert entry.id == "sphere"


def test_load_grid_spec(tmp_path):
    rows = []
    for x in np.linspace(-1, 1, 5):
        rows.append(f"{x:.6g},0,0,0,{0.5 * x:.6g}")
    grid = tmp_path / "c.csv"
    grid.write_text("\n".join(rows) + "\n")
    spec = f"kind = grid\nlabel = halfx\nbase_dim = 1\nfibre_dim = 1\ngrid_file = {grid}\n"
    entry = pt.load_geometry_spec(spec)
    assert entry.id == "halfx"
    assert entry.traits.linear and entry.traits.factorizable
    assert coeffs3_at(entry.geometry, np.array([0.4]))[0, 0, 0] == pytest.approx(0.2)
    # transports from this grid honor the laws
    rep = pt.check_groupoid_laws(entry.transport, pt.segment([-0.5], [0.5]), samples=3, seed=0, step=1e-3)
    assert rep.passed


def test_bad_specs_raise():
    with pytest.raises(SpecFormatError):
        pt.load_geometry_spec("kind = builtin\n")
    with pytest.raises(SpecFormatError):
        pt.load_geometry_spec("kind = warp\n")
    with pytest.raises(SpecFormatError):
        pt.load_geometry_spec("this is not key value")
