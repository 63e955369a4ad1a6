import numpy as np
import pytest

from ibnls.cutoff import (JOINT, ChiProfile, big_phi_from, default_chi, make_cutoff,
                          scaling_certificate, smoothstep)
from ibnls.errors import CutoffTooLarge
from ibnls.grid import make_grid
from ibnls.model import b_upper, make_params
from ibnls.verify import cutoff_property_violations


@pytest.fixture(scope="module")
def cut(grid61):
    return make_cutoff(grid61, 7.5)


def test_inside_values(cut):
    r = cut.grid.nodes
    i = np.argmin(np.abs(r - cut.R / 2))
    x = r[i]
    assert cut.phi[i] == x * x
    assert cut.dphi[i] == 2 * x
    assert cut.d2phi[i] == 2.0
    assert cut.big_phi[i] == pytest.approx(16.0, abs=1e-14)


def test_outside_constant(cut):
    r = cut.grid.nodes
    far = r >= 2.5 * cut.R
    assert np.all(cut.dphi[far] == 0.0)
    assert np.ptp(cut.phi[far]) == 0.0
    assert cut.phi[far][0] > 0


@pytest.mark.parametrize("R", [2.0, 5.0, 7.5, 14.0])
def test_pointwise_properties_every_node(grid61, R):
    v = cutoff_property_violations(make_cutoff(grid61, R))
    assert all(x <= 1e-12 for x in v.values()), v


def test_chi_values():
    chi = default_chi()
    s = np.array([0.5, 1.0, JOINT, 2.0, 3.0])
    out = chi.chi(s)
    assert out[0] == pytest.approx(1.0)
    assert out[1] == pytest.approx(2.0)
    assert out[2] == pytest.approx(1.0 + np.sqrt(2.0), rel=1e-13)
    assert out[3] == 0.0 and out[4] == 0.0


def test_chi_shape():
    chi = default_chi()
    s = np.linspace(JOINT + 1e-6, 1.97, 2001)
    assert np.all(np.diff(chi.chi(s)) < 0)       # strictly decreasing bridge
    # (2-s)^7 sinks below rounding of the expanded polynomial near s = 2
    s = np.linspace(1.97, 2.0, 301)
    assert np.all(np.abs(chi.chi(s)) < 1e-5)
    s = np.linspace(1.0 + chi.mollify, JOINT, 50)
    assert np.allclose(chi.chi(s), 2 * s - 2 * (s - 1) ** 2, rtol=0, atol=1e-13)
    s = np.linspace(0.0, 3.0, 4001)
    assert np.all(chi.chi(s) >= -1e-15)


def test_chi_smooth_across_breaks():
    chi = default_chi()
    for br in chi.breaks[1:]:
        for k in range(0, 8):   # φ^{(k)}, i.e. χ up to its sixth derivative
            left = chi.phi_deriv(np.array([br - 1e-9]), k)[0]
            right = chi.phi_deriv(np.array([br]), k)[0]
            scale = max(1.0, abs(left), abs(right))
            assert abs(left - right) < 1e-6 * scale * 10 ** k, (br, k)


def test_smoothstep():
    H = smoothstep(6)
    assert H(0.0) == 0.0 and H(1.0) == pytest.approx(1.0)
    for k in range(1, 7):
        d = H.deriv(k)
        assert abs(d(0.0)) < 1e-9 and abs(d(1.0)) < 1e-6


def test_mollify_width_validated():
    with pytest.raises(ValueError):
        ChiProfile(mollify=0.5)
    with pytest.raises(ValueError):
        ChiProfile(mollify=0.0)


def test_big_phi_identity_lattice():
    for N in range(5, 41):
        for b in np.linspace(0.0, b_upper(N), 23)[1:-1]:
            r = np.array([0.3, 1.0, 7.0])
            val = big_phi_from(2 * r, np.full(3, 2.0), r, N, b)
            assert np.allclose(val, 16.0, rtol=0, atol=1e-13), (N, b)


def test_scaling_certificate():
    c1 = scaling_certificate([5.0, 10.0, 20.0], 1)
    assert c1[0] == pytest.approx(2.5)            # max χ, at s = 3/2
    assert np.ptp(c1) < 1e-12
    for j in range(2, 7):
        c = scaling_certificate([5.0, 10.0, 20.0], j)
        assert np.all(np.isfinite(c))
        assert max(c) / min(c) - 1.0 < 1e-9
    # the signed supremum of φ'' is 2; |φ''| is larger on the bridge
    chi = default_chi()
    s = np.linspace(0.0, 2.5, 100_001)
    assert np.max(chi.phi_deriv(s, 2)) == pytest.approx(2.0, abs=1e-12)


def test_scaling_on_grid_close_to_dense(grid61):
    for j in (1, 2, 3):
        dense = scaling_certificate([3.0, 5.0], j)
        on_grid = scaling_certificate([3.0, 5.0], j, grid61)
        assert np.all(np.array(on_grid) <= np.array(dense) * (1 + 1e-9))
        assert np.all(np.array(on_grid) >= 0.5 * np.array(dense))
    with pytest.raises(ValueError):
        scaling_certificate([5.0], 7)


def test_iterated_laplacians_consistent(cut):
    r = cut.grid.nodes
    N = cut.grid.N
    d = cut.derivs
    assert np.allclose(cut.delta_phi, d[2] + (N - 1) * d[1] / r, rtol=1e-12, atol=1e-12)
    # Δ²φ against a centred difference of the tabulated Δφ
    chi = default_chi()
    R = cut.R
    x = np.linspace(1.05 * R, 1.95 * R, 37)
    hh = 2e-5 * R

    def lap(y):
        return R ** 0 * chi.phi_deriv(y / R, 2) + (N - 1) * R * chi.phi_deriv(y / R, 1) / y

    fd = (lap(x + hh) - 2 * lap(x) + lap(x - hh)) / hh ** 2 \
        + (N - 1) / x * (lap(x + hh) - lap(x - hh)) / (2 * hh)
    from ibnls.cutoff import radial_profile_table
    tab = radial_profile_table(chi, R, N, x)
    scale = np.abs(tab["delta2_phi"]).max()
    assert np.max(np.abs(fd - tab["delta2_phi"])) < 1e-5 * scale


def test_delta3_support(cut):
    r = cut.grid.nodes
    off = (r < cut.R) | (r > 2 * cut.R)
    assert np.all(cut.delta3_phi[off] == 0.0)
    assert np.any(cut.delta3_phi[~off] != 0.0)


def test_cutoff_too_large(grid61):
    for R in (15.0, 20.0, 0.0, -1.0):
        with pytest.raises(CutoffTooLarge):
            make_cutoff(grid61, R)


def test_csv_dump(tmp_path, cut):
    path = tmp_path / "cut.csv"
    cut.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,phi,dphi,d2phi,delta_phi,delta2_phi,delta3_phi,big_phi"
    assert len(lines) == cut.grid.n + 1


def test_other_dimensions():
    for N, b in [(5, 1.0), (8, 2.0), (10, 3.5)]:
        g = make_grid(make_params(N, b), 20.0, 400)
        v = cutoff_property_violations(make_cutoff(g, 6.0))
        assert all(x <= 1e-12 for x in v.values()), (N, v)
