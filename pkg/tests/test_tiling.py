"""Tiling documents: lozenge facets of interlaced arrays, domino facets of
shuffle states via the rank-pairing bijection.

The exact-cover check built into TilingDocument doubles as the oracle for
every rendered document (each region cell covered exactly once, nothing
sticking out); bijectivity of the domino pairing is verified by brute force
at small orders against the closed-form tiling count 2^{t(t+1)/2}.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpzkit.errors import InvalidParameterError
from kpzkit.interlace import (
    AztecArray,
    InterlacedArray,
    aztec_shuffle_run,
    interlace_attempt,
    interlace_ct_run,
    interlace_init,
)
from kpzkit.tiling import _MAX_DOMINO_ORDER, TilingDocument, _coder, \
    render_tiling

ORDER2_STATES = [
    ((0,), (0, 1)), ((0,), (0, 2)), ((1,), (0, 1)), ((1,), (0, 2)),
    ((1,), (1, 1)), ((1,), (1, 2)), ((2,), (0, 2)), ((2,), (1, 2)),
]


def all_shuffle_states(t):
    """Brute-force order-t states: box i-1 <= z_i^n <= i-1+(t-n+1), weak
    interlacing between consecutive levels."""
    states = []

    def build(n, acc, prev):
        if n > t:
            states.append(tuple(acc))
            return
        for cfg in level(n, prev):
            build(n + 1, acc + [cfg], cfg)

    def level(n, prev):
        out = []

        def rec(i, cur):
            if i > n:
                out.append(tuple(cur))
                return
            lo = max([i - 1] + ([cur[-1]] if cur else [])
                     + ([prev[i - 2]] if i >= 2 else []))
            hi = i - 1 + (t - n + 1)
            if i <= n - 1:
                hi = min(hi, prev[i - 1])
            for z in range(lo, hi + 1):
                cur.append(z)
                rec(i + 1, cur)
                cur.pop()

        rec(1, [])
        return out

    build(1, [], ())
    return states


def facet_by_slot(doc):
    return {f.cells[0]: f.cls for f in doc.facets}


# ---------------------------------------------------------------------------
# lozenge rendering
# ---------------------------------------------------------------------------

def test_packed_array_renders_perfectly_ordered():
    N = 3
    doc = render_tiling(interlace_init(N))
    assert doc.kind == "lozenge"
    assert doc.region == {"window": (-4, 1), "levels": N}
    assert doc.counts() == {"flat": 6, "riser": 6, "run": 3}
    slots = facet_by_slot(doc)
    for s in range(N):
        # risers exactly at the packed particle sites of level s+1
        risers = {x for (x, strip), c in slots.items()
                  if strip == s and c == "riser"}
        assert risers == set(range(-s - 1, 0))
        # three ordered sectors per strip: flats, then risers, then runs
        flats = [x for (x, strip), c in slots.items()
                 if strip == s and c == "flat"]
        runs = [x for (x, strip), c in slots.items()
                if strip == s and c == "run"]
        assert all(x < min(risers) for x in flats)
        assert all(x > max(risers) for x in runs)


def test_facet_count_depends_only_on_shape():
    # same window, different states: always one facet per (column, strip)
    # slot, and the riser count is pinned to the particle count
    N, window = 4, (-9, 7)
    rng = np.random.default_rng(2)
    S0 = interlace_init(N)
    for S in (S0, interlace_ct_run(S0, 1.0, rng),
              interlace_ct_run(S0, 2.0, rng)):
        doc = render_tiling(S, window=window)
        width = window[1] - window[0]
        assert len(doc.facets) == N * width
        assert doc.counts()["riser"] == N * (N + 1) // 2


def test_single_jump_changes_only_adjacent_facets():
    S = InterlacedArray([[0], [-2, 1]])
    window = (-4, 4)
    before = facet_by_slot(render_tiling(S, window=window))
    after = facet_by_slot(render_tiling(interlace_attempt(S, 1, 1),
                                        window=window))
    changed = {slot for slot in before if before[slot] != after[slot]}
    # jump of (1, 1) from p=0: exactly the riser slot, the landing slot and
    # the slot straddled in the strip above
    assert changed == {(0, 0), (1, 0), (0, 1)}
    assert before[(0, 0)] == "riser" and after[(0, 0)] == "flat"
    assert before[(1, 0)] == "run" and after[(1, 0)] == "riser"
    assert before[(0, 1)] == "flat" and after[(0, 1)] == "run"


def test_pushed_jump_stays_in_two_columns():
    # (1,1), (2,2), (3,3) share a site in the packed state; the cascading
    # jump still only touches columns p and p+1
    S = interlace_init(3)
    window = (-5, 3)
    before = facet_by_slot(render_tiling(S, window=window))
    after = facet_by_slot(render_tiling(interlace_attempt(S, 1, 1),
                                        window=window))
    changed = {slot for slot in before if before[slot] != after[slot]}
    assert changed
    assert {x for x, _ in changed} <= {-1, 0}


def test_window_clipping_drops_outside_particles():
    S = interlace_init(3)
    doc = render_tiling(S, window=(-2, 1))
    # only the particles at -2 and -1 of each level fall inside
    assert doc.counts()["riser"] == 5
    assert len(doc.facets) == 9


def test_lozenge_window_must_be_nonempty():
    with pytest.raises(InvalidParameterError):
        render_tiling(interlace_init(2), window=(3, 3))


# ---------------------------------------------------------------------------
# document invariants
# ---------------------------------------------------------------------------

def test_document_rejects_missing_cell():
    doc = render_tiling(interlace_init(2))
    with pytest.raises(InvalidParameterError, match="not covered"):
        TilingDocument(doc.kind, doc.facets[1:], doc.region)


def test_document_rejects_double_cover():
    doc = render_tiling(interlace_init(2))
    with pytest.raises(InvalidParameterError, match="covered twice"):
        TilingDocument(doc.kind, doc.facets + [doc.facets[0]], doc.region)


def test_document_rejects_overhang():
    doc = render_tiling(interlace_init(2))
    lo, hi = doc.region["window"]
    shrunk = {"window": (lo, hi - 1), "levels": doc.region["levels"]}
    with pytest.raises(InvalidParameterError, match="outside"):
        TilingDocument(doc.kind, doc.facets, shrunk)


def test_document_rejects_unknown_kind():
    with pytest.raises(InvalidParameterError, match="kind"):
        TilingDocument("penrose", [], {"order": 0})


def test_svg_and_json_outputs():
    doc = render_tiling(interlace_init(2))
    svg = doc.to_svg()
    assert svg.startswith("<svg")
    assert svg.count("<polygon") == len(doc.facets)
    for cls in doc.counts():
        assert f'class="{cls}"' in svg
    assert doc.to_svg() == svg  # deterministic
    parsed = json.loads(doc.to_json())
    assert parsed["kind"] == "lozenge"
    assert len(parsed["facets"]) == len(doc.facets)
    assert {f["class"] for f in parsed["facets"]} == set(doc.counts())


# ---------------------------------------------------------------------------
# domino rendering
# ---------------------------------------------------------------------------

def test_zero_step_diamond_is_empty():
    rng = np.random.default_rng(0)
    doc = render_tiling(aztec_shuffle_run(1, 0.5, 0, rng))
    assert doc.kind == "domino"
    assert doc.facets == [] and doc.counts() == {}
    assert json.loads(doc.to_json())["facets"] == []
    assert doc.to_svg().startswith("<svg")


def test_packed_state_renders_all_horizontal():
    rng = np.random.default_rng(0)
    Z = aztec_shuffle_run(4, 0.0, 4, rng)   # q=0 keeps the packed state
    doc = render_tiling(Z)
    assert doc.counts() == {"horizontal": 20}


def test_maximal_state_renders_all_vertical():
    rng = np.random.default_rng(0)
    doc = render_tiling(aztec_shuffle_run(4, 1.0, 4, rng))
    assert doc.counts() == {"vertical": 20}


def test_order2_frozen_vertical_cells():
    Z = AztecArray([[2], [1, 2]], step=2, q=1.0)
    doc = render_tiling(Z)
    assert all(f.cls == "vertical" for f in doc.facets)
    roots = {f.cells[0] for f in doc.facets}
    assert roots == {(-2, -1), (-1, -2), (-1, 0), (0, -2), (0, 0), (1, -1)}


def test_order2_states_render_distinctly():
    keys = set()
    for levels in ORDER2_STATES:
        doc = render_tiling(AztecArray([list(r) for r in levels],
                                       step=2, q=0.5))
        h = doc.counts().get("horizontal", 0)
        v = doc.counts().get("vertical", 0)
        assert 2 * h + 2 * v == 12
        keys.add(doc.key())
    assert len(keys) == len(ORDER2_STATES)


def test_rank_pairing_is_a_bijection_small_orders():
    for t in (1, 2, 3):
        coder = _coder(t)
        total = 2 ** (t * (t + 1) // 2)
        assert coder.array_count() == total
        assert coder.tiling_count() == total
        states = all_shuffle_states(t)
        assert len(states) == total
        ranks = {coder.rank_array([list(r) for r in s]) for s in states}
        assert ranks == set(range(total))
        keys = set()
        for s in states:
            doc = render_tiling(AztecArray([list(r) for r in s],
                                           step=t, q=0.5))
            keys.add(doc.key())
        assert len(keys) == total


def test_tiling_counts_closed_form():
    for t in (1, 2, 3, 4, 5):
        assert _coder(t).tiling_count() == 2 ** (t * (t + 1) // 2)


def test_rank_rejects_non_state():
    # interlacing holds but the box constraint fails: order-2 level 1 cannot
    # sit at 3 after only 2 steps
    with pytest.raises(InvalidParameterError, match="not an order-2"):
        _coder(2).rank_array([[3], [1, 3]])


def test_render_requires_enough_levels():
    rng = np.random.default_rng(1)
    Z = aztec_shuffle_run(2, 0.5, 3, rng)
    with pytest.raises(InvalidParameterError, match="N >= steps"):
        render_tiling(Z)


def test_render_order_cap():
    t = _MAX_DOMINO_ORDER + 1
    Z = AztecArray([list(range(n)) for n in range(1, t + 1)], step=t, q=0.5)
    with pytest.raises(InvalidParameterError, match="exceeds"):
        render_tiling(Z)


def test_window_rejected_for_domino():
    Z = AztecArray([[0]], step=0, q=0.5)
    with pytest.raises(InvalidParameterError, match="lozenge"):
        render_tiling(Z, window=(-1, 1))


def test_render_rejects_other_types():
    with pytest.raises(InvalidParameterError, match="cannot render"):
        render_tiling(np.arange(3))


def test_domino_svg_classes():
    rng = np.random.default_rng(3)
    doc = render_tiling(aztec_shuffle_run(3, 0.5, 3, rng))
    svg = doc.to_svg()
    assert svg.count("<polygon") == len(doc.facets)
    for cls in doc.counts():
        assert f'class="{cls}"' in svg


@given(st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.floats(min_value=0.0, max_value=1.0),
       st.integers(min_value=0, max_value=3))
@settings(max_examples=30, deadline=None)
def test_domino_render_property(seed, q, steps):
    Z = aztec_shuffle_run(max(steps, 1), q, steps,
                          np.random.default_rng(seed))
    doc = render_tiling(Z)
    covered = sum(len(f.cells) for f in doc.facets)
    assert covered == 2 * steps * (steps + 1)
    assert doc.key() == render_tiling(Z).key()


@given(st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.integers(min_value=1, max_value=4),
       st.floats(min_value=0.0, max_value=2.0))
@settings(max_examples=30, deadline=None)
def test_lozenge_render_property(seed, N, t):
    S = interlace_ct_run(interlace_init(N), t, np.random.default_rng(seed))
    doc = render_tiling(S)
    lo, hi = doc.region["window"]
    assert len(doc.facets) == N * (hi - lo)
    assert doc.counts()["riser"] == N * (N + 1) // 2
