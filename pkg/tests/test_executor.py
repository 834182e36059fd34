import threading
from collections import Counter

import numpy as np
import pytest

import lanework as lw
from conftest import all_schedule_configs, random_csr, random_tile_set


def tile_set(offsets):
    return lw.TileSet(np.asarray(offsets, dtype=np.int64))


def atom_enumeration(ts):
    """The ground-truth multiset {(tile, atom)} a correct schedule must visit."""
    return Counter(
        (t, a)
        for t in range(ts.num_tiles)
        for a in range(ts.atom_offset(t), ts.atom_offset(t + 1))
    )


def visited_pairs(ts, cfg):
    seen = Counter()
    lock = threading.Lock()
    if cfg.schedule is lw.ScheduleKind.MERGE_PATH:
        def atom_fn(lane, tile, atom):
            with lock:
                seen[(tile, atom)] += 1
            return 0.0

        carries = lw.execute_merge_path(cfg, ts, atom_fn, lambda lane, tile, acc: None)
        lw.fixup_combine(carries, lambda tile, partial: None)
    else:
        def work_fn(lane, tile, atoms):
            with lock:
                for a in atoms:
                    seen[(tile, a)] += 1

        lw.execute_tile_major(cfg, ts, work_fn)
    return seen


class TestCoverage:
    @pytest.mark.parametrize("lane_count", [1, 2, 7, 32])
    def test_all_schedules_visit_every_atom_once(self, lane_count):
        rng = np.random.default_rng(lane_count)
        for _ in range(10):
            ts = random_tile_set(rng)
            want = atom_enumeration(ts)
            for cfg in all_schedule_configs(lanes=lane_count, group_sizes=(1, 4)):
                assert visited_pairs(ts, cfg) == want, cfg

    def test_counting_kernel_recovers_tile_sizes(self):
        ts = tile_set([0, 3, 3, 7, 8])
        for cfg in all_schedule_configs(lanes=3, worker_threads=2):
            counter = np.zeros(ts.num_tiles, dtype=np.int64)
            if cfg.schedule is lw.ScheduleKind.MERGE_PATH:
                carries = lw.execute_merge_path(
                    cfg, ts, lambda lane, t, a: 1.0,
                    lambda lane, t, acc: counter.__setitem__(t, counter[t] + int(acc)))
                lw.fixup_combine(carries, lambda t, p: counter.__setitem__(t, counter[t] + int(p)))
            else:
                def count(lane, tile, atoms):
                    counter[tile] += len(atoms)

                lw.execute_tile_major(cfg, ts, count)
            np.testing.assert_array_equal(counter, ts.atoms_per_tile())

    def test_empty_tile_set_never_invokes_work(self):
        ts = tile_set([0])
        for cfg in all_schedule_configs(lanes=4):
            assert not visited_pairs(ts, cfg)


class TestGroupMappedAssignment:
    def test_member_stride_example(self):
        # atoms per tile (2,1,3): members of a size-4 group take local atoms
        # {0,4},{1,5},{2},{3} attributed to tiles {0,2},{0,2},{1},{2}
        ts = tile_set([0, 2, 3, 6])
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.GROUP_MAPPED, lanes=4,
                                group_size=4, tiles_per_block=4)
        per_lane = {lane: [] for lane in range(4)}
        lw.execute_tile_major(cfg, ts, lambda lane, tile, atoms: per_lane[lane].append(
            (tile, atoms.start)))
        assert per_lane[0] == [(0, 0), (2, 4)]
        assert per_lane[1] == [(0, 1), (2, 5)]
        assert per_lane[2] == [(1, 2)]
        assert per_lane[3] == [(2, 3)]

    def test_group_size_one_matches_thread_mapped_order(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            ts = random_tile_set(rng)
            lanes = 5
            tm = {lane: [] for lane in range(lanes)}
            gm = {lane: [] for lane in range(lanes)}
            cfg_tm = lw.ExecutorConfig(schedule=lw.ScheduleKind.THREAD_MAPPED, lanes=lanes)
            lw.execute_tile_major(cfg_tm, ts, lambda lane, tile, atoms: tm[lane].extend(
                (tile, a) for a in atoms))
            cfg_gm = lw.ExecutorConfig(schedule=lw.ScheduleKind.GROUP_MAPPED, lanes=lanes,
                                       group_size=1, tiles_per_block=1)
            lw.execute_tile_major(cfg_gm, ts, lambda lane, tile, atoms: gm[lane].extend(
                (tile, a) for a in atoms))
            assert tm == gm


class TestMergePathExecutor:
    def test_single_lane_no_carries(self):
        ts = tile_set([0, 2, 3, 6])
        done = []
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=1)
        carries = lw.execute_merge_path(cfg, ts, lambda lane, t, a: 1.0,
                                        lambda lane, t, acc: done.append((t, acc)))
        assert done == [(0, 2.0), (1, 1.0), (2, 3.0)]
        assert all(c.tile == lw.SENTINEL_TILE for c in carries)

    def test_three_lane_example(self):
        # slices (0,0)-(1,2), (1,2)-(2,4), (2,4)-(3,6)
        ts = tile_set([0, 2, 3, 6])
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=3)
        done = []
        carries = lw.execute_merge_path(
            cfg, ts, lambda lane, t, a: float(a),
            lambda lane, t, acc: done.append((lane, t, acc)))
        assert done == [(0, 0, 0.0 + 1.0), (1, 1, 2.0), (2, 2, 4.0 + 5.0)]
        assert carries[0].tile == lw.SENTINEL_TILE  # boundary-aligned
        assert carries[1] == (2, 3.0)  # partial of tile 2, atom 3
        assert carries[2].tile == lw.SENTINEL_TILE  # lane 2 finishes tile 2

    def test_sum_of_ones_recovers_tile_sizes_after_fixup(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            ts = random_tile_set(rng)
            for lanes in (1, 3, 8, 64):
                totals = np.zeros(max(ts.num_tiles, 1))
                cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=lanes)
                carries = lw.execute_merge_path(
                    cfg, ts, lambda lane, t, a: 1.0,
                    lambda lane, t, acc: totals.__setitem__(t, totals[t] + acc))
                lw.fixup_combine(carries, lambda t, p: totals.__setitem__(t, totals[t] + p))
                np.testing.assert_array_equal(totals[: ts.num_tiles], ts.atoms_per_tile())

    def test_one_long_tile_produces_multiple_carries(self):
        ts = tile_set([0, 100])
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=8)
        total = np.zeros(1)
        carries = lw.execute_merge_path(
            cfg, ts, lambda lane, t, a: 1.0,
            lambda lane, t, acc: total.__setitem__(t, total[t] + acc))
        live = [c for c in carries if c.tile != lw.SENTINEL_TILE]
        assert len(live) >= 2 and all(c.tile == 0 for c in live)
        lw.fixup_combine(carries, lambda t, p: total.__setitem__(t, total[t] + p))
        assert total[0] == 100

    def test_custom_carry_policy(self):
        # per-tile max instead of sum
        ts = tile_set([0, 4, 7])
        values = np.array([3.0, 9.0, 1.0, 4.0, 8.0, 2.0, 6.0])
        best = np.zeros(2)
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=3)
        carries = lw.execute_merge_path(
            cfg, ts, lambda lane, t, a: values[a],
            lambda lane, t, acc: best.__setitem__(t, max(best[t], acc)),
            carry_policy=lw.CarryPolicy(identity=0.0, combine=max))
        lw.fixup_combine(carries, lambda t, p: best.__setitem__(t, max(best[t], p)))
        np.testing.assert_array_equal(best, [9.0, 8.0])

    def test_fixup_no_carries_is_noop(self):
        hits = []
        lw.fixup_combine([lw.CarryOut(lw.SENTINEL_TILE, 0.0)] * 4,
                         lambda t, p: hits.append(t))
        assert hits == []

    def test_fixup_order_does_not_matter_for_integers(self):
        carries = [lw.CarryOut(0, 2.0), lw.CarryOut(1, 3.0), lw.CarryOut(0, 5.0)]
        results = []
        for perm in ([0, 1, 2], [2, 1, 0], [1, 2, 0]):
            out = np.zeros(2)
            lw.fixup_combine([carries[i] for i in perm],
                             lambda t, p: out.__setitem__(t, out[t] + p))
            results.append(out.copy())
        for r in results[1:]:
            np.testing.assert_array_equal(r, results[0])

    def test_work_fn_exception_surfaces(self):
        ts = tile_set([0, 5])
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=4, worker_threads=2)

        def boom(lane, tile, atom):
            raise RuntimeError("kernel failure")

        with pytest.raises(RuntimeError, match="kernel failure"):
            lw.execute_merge_path(cfg, ts, boom, lambda lane, t, acc: None)

        cfg_tm = lw.ExecutorConfig(schedule=lw.ScheduleKind.THREAD_MAPPED, lanes=4,
                                   worker_threads=2)
        with pytest.raises(RuntimeError, match="kernel failure"):
            lw.execute_tile_major(cfg_tm, ts, boom)


class TestThreadInvariance:
    def test_lane_to_thread_mapping_never_changes_results(self):
        rng = np.random.default_rng(10)
        m = random_csr(rng, 60, 60, 400, integer_values=True)
        x = rng.integers(-3, 4, size=60).astype(np.float64)
        with lw.use_backend("numpy"):
            for kind in lw.ScheduleKind:
                outs = []
                for threads in (1, 8):
                    cfg = lw.ExecutorConfig(schedule=kind, lanes=64, worker_threads=threads,
                                            group_size=4)
                    outs.append(lw.spmv(m, x, cfg))
                np.testing.assert_array_equal(outs[0], outs[1])


class TestImbalance:
    def test_one_giant_tile_thread_mapped(self):
        ts = tile_set([0, 1000] + [1000] * 7)  # 8 tiles, all atoms in tile 0
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.THREAD_MAPPED, lanes=8)
        report = lw.imbalance(ts, cfg)
        assert report.imbalance_factor == pytest.approx(8.0)
        assert report.per_lane_atoms.sum() == ts.num_atoms

    def test_merge_path_bounded_by_quota(self):
        ts = tile_set([0, 1000])
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=8)
        report = lw.imbalance(ts, cfg)
        quota = -(-(1 + 1000) // 8)
        assert report.max <= quota
        assert report.per_lane_atoms.sum() == ts.num_atoms

    def test_atom_totals_conserved_for_all_schedules(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            ts = random_tile_set(rng)
            for cfg in all_schedule_configs(lanes=6, group_sizes=(1, 4)):
                assert lw.imbalance(ts, cfg).per_lane_atoms.sum() == ts.num_atoms

    def test_empty_tile_set_reports_factor_one(self):
        ts = tile_set([0, 0, 0])
        cfg = lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=4)
        assert lw.imbalance(ts, cfg).imbalance_factor == 1.0

    def test_power_law_merge_path_beats_thread_mapped(self):
        m = lw.generate_power_law_csr(10_000, 8.0, skew=1.1, seed=3)
        ts = lw.csr_tile_set(m)
        tm = lw.imbalance(ts, lw.ExecutorConfig(schedule=lw.ScheduleKind.THREAD_MAPPED, lanes=64))
        mp = lw.imbalance(ts, lw.ExecutorConfig(schedule=lw.ScheduleKind.MERGE_PATH, lanes=64))
        assert mp.imbalance_factor < tm.imbalance_factor


class TestAtomicMin:
    def test_basic_semantics(self):
        slots = lw.AtomicMinArray(np.array([np.inf, 3.0]))
        assert lw.atomic_min_real(slots, 0, 5.0) == np.inf
        assert slots.values[0] == 5.0
        assert lw.atomic_min_real(slots, 1, 5.0) == 3.0
        assert slots.values[1] == 3.0

    def test_negative_candidate_rejected(self):
        slots = lw.AtomicMinArray(np.array([1.0]))
        with pytest.raises(ValueError):
            slots.atomic_min(0, -0.5)

    def test_negative_slot_rejected(self):
        with pytest.raises(ValueError):
            lw.AtomicMinArray(np.array([-1.0]))

    def test_64_racing_threads_settle_on_global_min(self):
        slots = lw.AtomicMinArray(np.full(1, np.inf))
        rng = np.random.default_rng(12)
        candidates = rng.random(64) * 100
        returns = np.zeros(64)
        barrier = threading.Barrier(64)

        def worker(i):
            barrier.wait()
            returns[i] = slots.atomic_min(0, candidates[i])

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(64)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert slots.values[0] == candidates.min()
        assert np.all(returns >= candidates.min())
