"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line (visible with pytest -s).  All checks are exact; the heavy sweeps
use int/numpy oracles that never route through the code paths they
check."""

import itertools
import random
from contextlib import contextmanager

import numpy as np

from thinlab.bits import (
    EventuallyConstant,
    EventuallyPeriodic,
    Word,
    all_words,
    flip,
    hd,
    popcount,
    theta,
)
from thinlab.capture import capture_alter, capture_ego, verify_theta_relation
from thinlab.codes import (
    Code,
    corrects,
    detects,
    extend_to_maximal_thin,
    is_k_thin,
    is_thin,
    min_distance,
    simulate_transmission,
    thin_equivalence_report,
)
from thinlab.game import Side, random_corpus
from thinlab.kthin import (
    ConflictGraph,
    lower_bound_ball_words,
    q_exact,
    q_lower_bound,
    q_table,
    verify_partition,
)
from thinlab.xorset import (
    FiniteXorCandidate,
    is_xorset_finite,
    parity_partition,
    verify_partition_implies_xor,
)


@contextmanager
def criterion(num, desc):
    try:
        yield
    except BaseException:
        print(f"[criterion {num}] FAIL  {desc}")
        raise
    print(f"[criterion {num}] PASS  {desc}")


# ---------------------------------------------------------------------------
# criterion 1: detection/correction thresholds vs exhaustive simulation


def _simulation_tables(n):
    """Vectorised receiver-side tables over every code mask of length n.

    For each mask T and received word r: the nearest-codeword distance,
    the number of nearest codewords, and the nearest codeword when it
    is unique.  Pure numpy, independent of the library's decode path.
    """
    size = 1 << n
    masks = np.arange(1 << size, dtype=np.uint32)
    present = ((masks[:, None] >> np.arange(size)[None, :]) & 1).astype(bool)
    dist = np.array(
        [[bin(x ^ y).count("1") for y in range(size)] for x in range(size)],
        dtype=np.uint8,
    )
    big = np.uint8(n + 1)
    md = np.empty((masks.size, size), dtype=np.uint8)
    cnt = np.empty((masks.size, size), dtype=np.uint8)
    arg = np.empty((masks.size, size), dtype=np.uint8)
    for r in range(size):
        table = np.where(present, dist[r][None, :], big)
        md[:, r] = table.min(axis=1)
        hits = table == md[:, r][:, None]
        cnt[:, r] = hits.sum(axis=1)
        arg[:, r] = hits.argmax(axis=1)
    return present, dist, md, cnt, arg


def test_criterion_1_detcor_equivalence_exhaustive_z2_4():
    n = 4
    size = 1 << n
    present, dist, md, cnt, arg = _simulation_tables(n)
    n_masks = present.shape[0]

    # oracle (simulation side): enumerate corrupted transmissions
    detect_ok = np.ones((n_masks, n + 1), dtype=bool)
    correct_ok = np.ones((n_masks, n + 1), dtype=bool)
    for k in range(1, n + 1):
        detect_ok[:, k] = detect_ok[:, k - 1]
        correct_ok[:, k] = correct_ok[:, k - 1]
        for x in range(size):
            for r in range(size):
                if dist[x, r] != k:
                    continue
                if x < r:  # each unordered pair once
                    detect_ok[:, k] &= ~(present[:, x] & present[:, r])
                decoded_back = (cnt[:, r] == 1) & (arg[:, r] == x)
                correct_ok[:, k] &= ~present[:, x] | decoded_back
    # weight-0 corruptions: decoding a clean codeword must accept it
    for x in range(size):
        correct_ok[:, 0] &= ~present[:, x] | ((cnt[:, x] == 1) & (arg[:, x] == x))

    # predicate (distance side): the library's thresholds
    words = [Word(v, n) for v in range(size)]
    sizes = np.array([bin(m).count("1") for m in range(n_masks)])
    checked = 0
    for mask in range(n_masks):
        if sizes[mask] < 2:
            continue
        T = Code(words[v] for v in range(size) if (mask >> v) & 1)
        for k in range(n + 1):
            assert detects(T, k) == bool(detect_ok[mask, k]), (mask, k)
            assert corrects(T, k) == bool(correct_ok[mask, k]), (mask, k)
        checked += 1
    assert checked == n_masks - size - 1

    # tie the numpy oracle to the operational simulate_transmission route
    rng = random.Random(11)
    for _ in range(300):
        mask = rng.randrange(n_masks)
        members = [v for v in range(size) if (mask >> v) & 1]
        if len(members) < 2:
            continue
        T = Code(words[v] for v in members)
        sent = rng.choice(members)
        positions = rng.sample(range(n), rng.randint(0, n))
        e = 0
        for i in positions:
            e |= 1 << i
        outcome = simulate_transmission(T, words[sent], positions)
        r = sent ^ e
        assert outcome.received.value == r
        assert outcome.detected == (not present[mask, r])
        if cnt[mask, r] == 1:
            assert outcome.decode.word.value == arg[mask, r]
        else:
            assert outcome.decode.word is None

    with criterion(1, f"detects/corrects match exhaustive simulation on all "
                      f"{checked} codes of length 4, k <= 4"):
        pass


# ---------------------------------------------------------------------------
# criterion 2: the three thinness characterisations agree


def test_criterion_2_thin_equivalence():
    with criterion(2, "thin <=> min distance >= 2 <=> injective projections "
                      "(256 subsets + 1000 stream families)"):
        words = all_words(3)
        for mask in range(1 << 8):
            chosen = [w for i, w in enumerate(words) if (mask >> i) & 1]
            T = Code(chosen, length=3)
            # oracle a: string projections
            injective = all(
                len({str(w)[:i] + str(w)[i + 1:] for w in chosen}) == len(chosen)
                for i in range(3)
            )
            # oracle b: distance threshold via raw ints
            dist_ok = all(
                bin(x.value ^ y.value).count("1") >= 2
                for x, y in itertools.combinations(chosen, 2)
            )
            assert injective == dist_ok == is_thin(T)

        rng = random.Random(2 * 3 * 5 * 7)
        families = 0
        while families < 1000:
            bases = [EventuallyConstant(Word.from_string("0110"), 0),
                     EventuallyPeriodic(Word.from_string("1"), Word.from_string("01"))]
            groups = rng.choice((1, 2))
            members, flip_keys = [], []
            for g in range(groups):
                for _ in range(rng.randint(1, 3)):
                    flips = frozenset(
                        rng.sample(range(12), rng.randint(0, 4))
                    )
                    s = bases[g]
                    for i in sorted(flips):
                        s = flip(s, i)
                    members.append(s)
                    flip_keys.append((g, flips))
            T = Code.of_streams(members)
            if len(T) < 2:
                continue
            families += 1
            # oracle: distance of two same-group members is the size of
            # the symmetric difference of their flip sets
            thin_expected = True
            seen = {}
            for key in flip_keys:
                if key in seen:
                    continue
                seen[key] = True
            keys = list(seen)
            for (g1, f1), (g2, f2) in itertools.combinations(keys, 2):
                if g1 == g2 and len(f1 ^ f2) == 1:
                    thin_expected = False
            rep = thin_equivalence_report(T)
            assert rep.consistent
            assert rep.thin == thin_expected
            assert rep.min_distance_ge_2 == thin_expected


# ---------------------------------------------------------------------------
# criterion 3: mirror-play capture


def test_criterion_3_capture_ego_corpus():
    with criterion(3, "capture of 100 seeded Ego strategies at 20 rounds: "
                      "distance-1 outcome pairs, 100/100"):
        corpus = random_corpus(Side.EGO, 100, seed=20240)
        assert len(corpus) == 100
        for e in corpus:
            res = capture_ego(e, rounds=20)
            assert res.initial.replay_check(ego=e)
            assert res.mirror.replay_check(ego=e)
            a = str(res.initial.outcome_prefix)
            b = str(res.mirror.outcome_prefix)
            assert len(a) == len(b)
            diffs = [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
            assert diffs == [len(res.initial.moves[0])]
            assert diffs == [res.divergence_index]


# ---------------------------------------------------------------------------
# criterion 4: diagonal capture


def test_criterion_4_capture_alter_corpus():
    with criterion(4, "diagonal capture of 50 seeded Alter strategies "
                      "(plays 0..4, 8 sweeps): enumeration + xor-shift at "
                      "L=16, 50/50"):
        corpus = random_corpus(Side.ALTER, 50, seed=77)
        assert len(corpus) == 50
        for a in corpus:
            res = capture_alter(a, m=4, sweeps=8)
            ids = [t.reply_id for t in res.trace if t.reply_id is not None]
            assert ids == list(range(1, len(res.reply_log) + 1))
            assert verify_theta_relation(res, 16)
            # independent bit-level oracle for the xor-shift relation
            r0 = res.outcome(0)
            for i in range(5):
                ri = res.outcome(i)
                for k in range(16):
                    assert ri[k] == r0[k] ^ ((i >> k) & 1), (i, k)


# ---------------------------------------------------------------------------
# criterion 5: parity partition and the cover-implies-xor sweep


def test_criterion_5_xor_parity_suite():
    with criterion(5, "parity partitions thin/disjoint up to n=10; "
                      "exhaustive n=3 cover sweep; exactly 2 xor-sets"):
        for n in range(2, 11):
            t0, t1 = parity_partition(n)
            assert len(t0) + len(t1) == 1 << n
            assert not (set(t0.members) & set(t1.members))
            assert is_thin(t0) and is_thin(t1)

        words = all_words(3)
        applicable = 0
        for mask in range(1 << 8):
            part0 = Code((w for i, w in enumerate(words) if (mask >> i) & 1),
                         length=3)
            part1 = Code((w for i, w in enumerate(words) if not (mask >> i) & 1),
                         length=3)
            rep = verify_partition_implies_xor(part0, part1)
            if rep.applicable:
                applicable += 1
                assert rep.holds
        assert applicable == 2

        xor_count = sum(
            is_xorset_finite(FiniteXorCandidate(
                3, frozenset(w for i, w in enumerate(words) if (mask >> i) & 1)))
            for mask in range(1 << 8)
        )
        assert xor_count == 2


# ---------------------------------------------------------------------------
# criterion 6: the partition-number table


def _brute_chromatic(adjacency):
    size = len(adjacency)
    for c in range(1, size + 1):
        def colorable(v, colors):
            if v == size:
                return True
            for col in range(c):
                if all(colors[u] != col for u in range(v)
                       if (adjacency[v] >> u) & 1):
                    colors.append(col)
                    if colorable(v + 1, colors):
                        return True
                    colors.pop()
            return False

        if colorable(0, []):
            return c
    raise AssertionError("unreachable")


def test_criterion_6_qtable():
    with criterion(6, "Q(n,2)=2 for n=2..10; Q(3,3)=4 with verified witness; "
                      "bounds consistent on every computed cell"):
        for n in range(2, 11):
            r = q_exact(n, 2)
            assert r.value == 2
            assert verify_partition(r.witness.parts, n, 2)

        g33 = ConflictGraph.build(3, 3)
        assert _brute_chromatic(g33.adjacency) == 4
        r33 = q_exact(3, 3)
        assert r33.value == 4
        assert verify_partition(r33.witness.parts, 3, 3)

        for r in q_table(4, 3):
            assert r.exact
            assert r.lower_bound.ball <= r.value
            assert verify_partition(r.witness.parts, r.n, r.k)
            S = lower_bound_ball_words(r.n, r.k)
            assert len(S) == q_lower_bound(r.n, r.k).ball
            for x, y in itertools.combinations(S, 2):
                assert (x.value ^ y.value).bit_count() <= r.k - 1


# ---------------------------------------------------------------------------
# criterion 7: bit-operator algebra


def test_criterion_7_bit_operator_algebra():
    with criterion(7, "xor-mask involution/identity/popcount and flip "
                      "involution, exhaustive on words of length <= 4"):
        for n in range(5):
            for x in all_words(n):
                for m in range(1 << n):
                    assert theta(x, 0) == x
                    assert theta(theta(x, m), m) == x
                    assert hd(theta(x, m), x) == popcount(m)
                for i in range(n):
                    assert flip(flip(x, i), i) == x
                    assert hd(x, flip(x, i)) == 1


# ---------------------------------------------------------------------------
# criterion 8: maximality


def test_criterion_8_maximality():
    with criterion(8, "greedy maximalisation passes add-one checks on 1000 "
                      "seeds; parity halves maximal thin up to n=6"):
        rng = random.Random(4040)
        words4 = all_words(4)
        done = 0
        while done < 1000:
            seed_words = rng.sample(words4, rng.randint(0, 3))
            seed = Code(seed_words, length=4)
            if not is_k_thin(seed, 2):
                continue
            done += 1
            grown = extend_to_maximal_thin(seed, 2)
            assert seed.members <= grown.members
            assert min_distance(grown) >= 2
            for w in words4:
                if w in grown:
                    continue
                assert any(
                    (w.value ^ t.value).bit_count() <= 1 for t in grown
                ), (seed_words, w)

        for n in range(2, 7):
            t0, t1 = parity_partition(n)
            for part, other in ((t0, t1), (t1, t0)):
                for w in other:
                    assert not is_k_thin(Code(set(part.members) | {w}), 2)
