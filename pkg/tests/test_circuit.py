import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvqss import circuit as c
from cvqss import gaussian as g
from cvqss import scheme as sch

T13 = np.array([[math.sqrt(2), -1.0], [-1.0, math.sqrt(2)]])
LN_SILVER = math.log(math.sqrt(2) + 1)


def frob(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def assert_passive(K: g.SymplecticTransform):
    M = K.matrix
    Om = g.omega(K.mode_count)
    assert frob(M.T @ M, np.eye(len(M))) < 1e-10
    assert frob(M @ Om, Om @ M) < 1e-10


# --- Bloch-Messiah --------------------------------------------------------------


def test_bloch_messiah_passive_input():
    for S in (g.identity(3), g.beamsplitter(0.3, 1.1), g.symplectic_from_position_map(np.array([[0, 1], [1, 0]]))):
        K_out, r, K_in = c.bloch_messiah(S)
        np.testing.assert_allclose(r, 0, atol=1e-12)
        assert frob(K_out.matrix @ K_in.matrix, S.matrix) < 1e-12


def test_bloch_messiah_T13():
    # T13 is symmetric with eigenvalues sqrt2 +- 1 on (1,-1) and (1,1)
    assert np.linalg.eigvalsh(T13) == pytest.approx([math.sqrt(2) - 1, math.sqrt(2) + 1], abs=1e-14)
    S = g.symplectic_from_position_map(T13)
    K_out, r, K_in = c.bloch_messiah(S)
    np.testing.assert_allclose(r, [LN_SILVER, LN_SILVER], atol=1e-10)
    assert math.exp(r[0]) == pytest.approx(math.sqrt(2) + 1, abs=1e-10)
    assert math.exp(-r[0]) == pytest.approx(math.sqrt(2) - 1, abs=1e-10)
    assert frob(K_out.matrix @ c.squeeze_matrix(r) @ K_in.matrix, S.matrix) < 1e-12


def test_bloch_messiah_rejects_nonsymplectic():
    with pytest.raises(g.NotSymplecticError):
        c.bloch_messiah(g.SymplecticTransform(np.diag([2.0, 1, 1, 1])))


@pytest.mark.parametrize("seed", range(10))
def test_bloch_messiah_random(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 6))
    S = c.random_symplectic(m, rng, depth=10)
    K_out, r, K_in = c.bloch_messiah(S)
    assert frob(K_out.matrix @ c.squeeze_matrix(r) @ K_in.matrix, S.matrix) < 1e-9
    assert np.all(r >= 0)
    assert np.all(np.diff(r) <= 1e-12)
    assert_passive(K_out)
    assert_passive(K_in)


def test_bloch_messiah_degenerate_squeezing():
    # equal squeezing on three modes, mixed by passives: a fully degenerate spectrum
    D = g.SymplecticTransform(c.squeeze_matrix([0.7, 0.7, 0.7]))
    P1 = c.replay(c.Circuit(3, [c.BeamSplitter((0, 1), 0.4, 0.2), c.BeamSplitter((1, 2), 1.0, -0.3)]))
    P2 = c.replay(c.Circuit(3, [c.PhaseShifter(0, 0.5), c.BeamSplitter((0, 2), 0.9, 1.3)]))
    S = P1 @ D @ P2
    K_out, r, K_in = c.bloch_messiah(S)
    np.testing.assert_allclose(r, 0.7, atol=1e-10)
    assert frob(K_out.matrix @ c.squeeze_matrix(r) @ K_in.matrix, S.matrix) < 1e-10


@pytest.mark.parametrize("diag", [[2.0, 0.5, 3.0], [1.0, 1.0, 4.0], [0.3, 0.3, 0.3]])
def test_squeezing_equals_log_singular_values_for_position_maps(diag):
    rng = np.random.default_rng(1)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    R, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    T = Q @ np.diag(diag) @ R
    _, r, _ = c.bloch_messiah(g.symplectic_from_position_map(T))
    expected = sorted(np.abs(np.log(np.linalg.svd(T, compute_uv=False))), reverse=True)
    np.testing.assert_allclose(r, expected, atol=1e-10)


# --- meshes ---------------------------------------------------------------------


def test_mesh_identity_is_empty():
    assert c.passive_to_mesh(g.identity(4)) == []


def test_mesh_50_50():
    els = c.passive_to_mesh(g.beamsplitter(math.pi / 4))
    splitters = [e for e in els if isinstance(e, c.BeamSplitter)]
    assert len(splitters) == 1
    assert splitters[0].theta == pytest.approx(math.pi / 4, abs=1e-14)
    assert frob(c.replay(c.Circuit(2, els)).matrix, g.beamsplitter(math.pi / 4).matrix) < 1e-14


def test_mesh_rejects_active():
    with pytest.raises(ValueError):
        c.passive_to_mesh(g.single_mode_squeezer(0.1))


@pytest.mark.parametrize("m", [2, 3, 5])
def test_mesh_random_passive(m, rng):
    U, _ = np.linalg.qr(rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m)))
    K = g.passive_from_unitary(U)
    els = c.passive_to_mesh(K)
    assert sum(isinstance(e, c.BeamSplitter) for e in els) <= m * (m - 1) // 2
    assert sum(isinstance(e, c.PhaseShifter) for e in els) <= m
    assert frob(c.replay(c.Circuit(m, els)).matrix, K.matrix) < 1e-9


# --- compile / replay -------------------------------------------------------------


def test_replay_empty():
    np.testing.assert_array_equal(c.replay(c.Circuit(3)).matrix, np.eye(6))


def test_replay_order():
    a, b = c.PhaseShifter(0, 0.3), c.SingleModeSqueezer(0, 0.5)
    S = c.replay(c.Circuit(1, [a, b]))
    assert frob(S.matrix, b.symplectic().matrix @ a.symplectic().matrix) < 1e-15


def test_compile_23_plans():
    spec = sch.ThresholdSchemeSpec(2, 3)
    dealer = c.compile(sch.solve_T(spec, (1, 2)).S.inverse())
    assert dealer.count(c.SingleModeSqueezer) == 0
    for collab in ((1, 2), (1, 3), (2, 3)):
        S = sch.solve_T(spec, collab).S
        assert frob(c.replay(c.compile(S)).matrix, S.matrix) < 1e-8
    c12 = c.compile(sch.solve_T(spec, (1, 2)).S)
    assert c12.count(c.BeamSplitter) == 1 and c12.count(c.SingleModeSqueezer) == 0
    c13 = c.compile(sch.solve_T(spec, (1, 3)).S)
    sq = [e.r for e in c13.elements if isinstance(e, c.SingleModeSqueezer)]
    assert sq and all(abs(v - LN_SILVER) < 1e-10 for v in sq)
    assert c13.count(c.TwoModeSqueezer) == 0


@pytest.mark.parametrize("seed", range(20))
def test_compile_random(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 7))
    S = c.random_symplectic(m, rng, depth=10)
    circ = c.compile(S)
    assert frob(c.replay(circ).matrix, S.matrix) < 1e-8
    assert circ.count(c.BeamSplitter) <= m * (m - 1)
    assert circ.count(c.PhaseShifter) <= 2 * m
    assert circ.count(c.SingleModeSqueezer) <= m


@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=6))
def test_compile_replay_property(seed, m):
    S = c.random_symplectic(m, np.random.default_rng(seed), depth=12, max_r=1.0)
    assert frob(c.replay(c.compile(S)).matrix, S.matrix) < 1e-8


def test_interferometers_23_replay_plans():
    spec = sch.ThresholdSchemeSpec(2, 3)
    for collab in ((1, 2), (1, 3), (2, 3)):
        assert frob(c.replay(sch.interferometer_23(collab)).matrix, sch.solve_T(spec, collab).S.matrix) < 1e-12
    dealer = c.replay(sch.dealer_interferometer_23())
    assert frob(dealer.matrix, sch.solve_T(spec, (1, 2)).S.inverse().matrix) < 1e-12


# --- netlist ----------------------------------------------------------------------


def test_netlist_roundtrip(rng):
    circ = c.random_circuit(4, rng, depth=15)
    text = c.to_netlist(circ)
    assert text.splitlines()[0] == "MODES 4"
    back = c.parse_netlist(text)
    assert len(back.elements) == len(circ.elements)
    assert frob(c.replay(back).matrix, c.replay(circ).matrix) < 1e-9
    assert c.to_netlist(back) == text


def test_netlist_format():
    circ = c.Circuit(
        3,
        [
            c.BeamSplitter((0, 1), math.pi / 4, 0.0),
            c.PhaseShifter(2, -1.0),
            c.SingleModeSqueezer(1, LN_SILVER, math.pi),
            c.TwoModeSqueezer((0, 2), 0.25, 0.5),
        ],
    )
    assert c.to_netlist(circ).splitlines() == [
        "MODES 3",
        "BS 0 1 0.785398163397 0",
        "PS 2 -1",
        "SQ 1 0.88137358702 3.14159265359",
        "TMS 0 2 0.25 0.5",
    ]


@pytest.mark.parametrize(
    "text",
    ["", "BS 0 1 0.1 0\n", "MODES 2\nXX 0\n", "MODES 2\nBS 0 1 0.1\n", "MODES 2\nPS 0 abc\n", "MODES 2\nBS 0 2 0.1 0\n"],
)
def test_netlist_errors(text):
    with pytest.raises(ValueError):
        c.parse_netlist(text)


def test_circuit_validates_elements():
    with pytest.raises(ValueError):
        c.Circuit(2, [c.BeamSplitter((0, 0), 0.1)])
    with pytest.raises(ValueError):
        c.Circuit(2, [c.PhaseShifter(0, float("nan"))])
