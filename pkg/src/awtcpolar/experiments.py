"""Monte Carlo harness: reliability/leakage bound values and end-to-end BER.

Two trial kinds share one CSV schema.  A "bounds" trial samples a single
adversary action and evaluates the T-block decoding-error and leakage bound
values on that realization.  An "end_to_end" trial runs the full chained
transmission with a fresh action per block, decodes both Bob's and Eve's
observations, and counts message bit errors on each side.

Per-trial seeds are derived from (base seed, cell parameters, trial index),
so serial and parallel sweeps produce bit-identical results.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adversary import (
    Strategy,
    apply_read,
    apply_write,
    read_equivalent_mask,
    sample_action,
    write_equivalent_mask,
)
from .codec import ChainCodec, ChainState
from .construction import CodeConfig, IndexPartition, InfeasibleConstruction, build_partition
from .polar_core import realize_profile

TRIAL_COLUMNS = [
    "kind",
    "N",
    "n",
    "beta",
    "rho_w",
    "rho_r",
    "T",
    "strategy",
    "trial",
    "seed",
    "ber_bound",
    "leak_bound",
    "bob_bit_errors",
    "eve_bit_errors",
    "message_bits",
    "erased_decisions",
]

AGGREGATE_COLUMNS = [
    "kind",
    "N",
    "n",
    "beta",
    "rho_w",
    "rho_r",
    "T",
    "strategy",
    "metric",
    "mean",
    "stderr",
    "trials",
]

KINDS = ("bounds", "end_to_end")


@dataclass(frozen=True)
class TrialResult:
    """One trial's bound values, error counts and audit trail."""

    kind: str
    n: int
    beta: float
    rho_w: float
    rho_r: float
    T: int
    strategy: str
    trial: int
    seed: int
    ber_bound: float
    leak_bound: float
    bob_bit_errors: int | None = None
    eve_bit_errors: int | None = None
    message_bits: int | None = None
    erased_decisions: int | None = None
    write_sizes: tuple = ()
    read_sizes: tuple = ()

    @property
    def N(self) -> int:
        return 1 << self.n


def derive_trial_seed(
    base_seed: int,
    kind: str,
    n: int,
    beta: float,
    rho_w: float,
    rho_r: float,
    T: int,
    strategy: Strategy,
    trial: int,
) -> int:
    """Deterministic 64-bit seed from the base seed and the full cell identity."""
    key = (
        int(base_seed),
        KINDS.index(kind),
        int(n),
        int(round(beta * 1e9)),
        int(round(rho_w * 1e9)),
        int(round(rho_r * 1e9)),
        int(T),
        list(Strategy).index(strategy),
        int(trial),
    )
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint64)[0])


def _bound_index_sets(partition: IndexPartition):
    """0-based positions for the two bound sums: (I union R, E, I union F)."""
    i_full = np.concatenate([partition.info, partition.chain_source])
    ir = np.sort(np.concatenate([i_full, partition.random])) - 1
    e = partition.chain_source - 1
    i_f = np.sort(np.concatenate([i_full, partition.frozen])) - 1
    return ir, e, i_f


def ber_bound_trial(config: CodeConfig, partition: IndexPartition, action) -> float:
    """T-block decoding-error bound value for one realization (an integer).

    With the exact boolean noise indicators Z of the writing realization this
    is T * sum(Z over I union R) + (T-1) * sum(Z over E), I meaning the full
    set including E.
    """
    ir, e, _ = _bound_index_sets(partition)
    z = realize_profile(write_equivalent_mask(action))
    return float(config.blocks * int(z[ir].sum()) + (config.blocks - 1) * int(z[e].sum()))


def leak_bound_trial(config: CodeConfig, partition: IndexPartition, action) -> float:
    """T-block leakage bound value for one realization (an integer).

    Counts the channels inside I union F that the realized reading set leaves
    noiseless for the eavesdropper, scaled by the block count.
    """
    _, _, i_f = _bound_index_sets(partition)
    z = realize_profile(read_equivalent_mask(action))
    return float(config.blocks * int((~z[i_f]).sum()))


def bounds_trial(
    config: CodeConfig,
    partition: IndexPartition,
    strategy: Strategy,
    seed: int,
    trial: int = 0,
) -> TrialResult:
    """Sample one adversary action and evaluate both bound values on it."""
    rng = np.random.default_rng(seed)
    action = sample_action(config.N, config.rho_w, config.rho_r, strategy, rng)
    return TrialResult(
        kind="bounds",
        n=config.n,
        beta=config.beta,
        rho_w=config.rho_w,
        rho_r=config.rho_r,
        T=config.blocks,
        strategy=strategy.value,
        trial=trial,
        seed=seed,
        ber_bound=ber_bound_trial(config, partition, action),
        leak_bound=leak_bound_trial(config, partition, action),
        write_sizes=(len(action.write_set),),
        read_sizes=(len(action.read_set),),
    )


def end_to_end_trial(
    config: CodeConfig,
    partition: IndexPartition,
    strategy: Strategy,
    seed: int,
    trial: int = 0,
) -> TrialResult:
    """Run T chained blocks end to end and decode on both sides.

    Bob decodes his written observation with the pre-shared chain state and
    threads his own decoded E bits forward.  Eve decodes her read observation
    with the same machinery but no pre-shared bits: her block-1 sink set is an
    ordinary channel decision and her erased decisions resolve to fair coin
    flips from her own stream.  The recorded bound values are the
    per-realization sums over the actual per-block adversary draws.
    """
    codec = ChainCodec(partition)
    msg_ss, enc_ss, pre_ss, adv_ss, eve_ss = np.random.SeedSequence(seed).spawn(5)
    msg_rng = np.random.default_rng(msg_ss)
    enc_rng = np.random.default_rng(enc_ss)
    adv_rng = np.random.default_rng(adv_ss)
    eve_rng = np.random.default_rng(eve_ss)

    preshared = codec.preshared_state(np.random.default_rng(pre_ss))
    alice_chain = preshared
    bob_chain = preshared
    eve_chain: ChainState | None = None

    ir, e_set, i_f = _bound_index_sets(partition)
    k = codec.message_size
    T = config.blocks

    bob_errors = 0
    eve_errors = 0
    erased = 0
    ber_acc = 0
    leak_acc = 0
    write_sizes = []
    read_sizes = []

    for t in range(1, T + 1):
        msg = msg_rng.integers(0, 2, size=k, dtype=np.uint8)
        x, alice_chain = codec.encode_block(msg, alice_chain, enc_rng)

        action = sample_action(config.N, config.rho_w, config.rho_r, strategy, adv_rng)
        write_sizes.append(len(action.write_set))
        read_sizes.append(len(action.read_set))

        zw = realize_profile(write_equivalent_mask(action))
        ber_acc += int(zw[ir].sum())
        if t < T:
            ber_acc += int(zw[e_set].sum())
        zr = realize_profile(read_equivalent_mask(action))
        leak_acc += int((~zr[i_f]).sum())

        bob_res = codec.sc_decode_block(apply_write(x, action.write_set), bob_chain)
        bob_chain = codec.extract_chain(bob_res.u)
        erased += bob_res.erased_decisions
        bob_errors += int((codec.extract_message(bob_res.u) != msg).sum())

        guess = eve_rng.integers(0, 2, size=config.N, dtype=np.uint8)
        eve_res = codec.sc_decode_block(
            apply_read(x, action.read_set), eve_chain, guess_bits=guess
        )
        eve_chain = codec.extract_chain(eve_res.u)
        eve_errors += int((codec.extract_message(eve_res.u) != msg).sum())

    return TrialResult(
        kind="end_to_end",
        n=config.n,
        beta=config.beta,
        rho_w=config.rho_w,
        rho_r=config.rho_r,
        T=T,
        strategy=strategy.value,
        trial=trial,
        seed=seed,
        ber_bound=float(ber_acc),
        leak_bound=float(leak_acc),
        bob_bit_errors=bob_errors,
        eve_bit_errors=eve_errors,
        message_bits=k * T,
        erased_decisions=erased,
        write_sizes=tuple(write_sizes),
        read_sizes=tuple(read_sizes),
    )


@dataclass(frozen=True)
class SweepSpec:
    """A grid of (n, beta) cells plus everything needed to rerun it exactly."""

    kind: str
    n_list: tuple
    beta_list: tuple
    rho_w: float
    rho_r: float
    blocks: int
    strategy: Strategy
    trials: int
    base_seed: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.n_list or not self.beta_list:
            raise ValueError("n and beta grids must be non-empty")
        object.__setattr__(self, "n_list", tuple(int(v) for v in self.n_list))
        object.__setattr__(self, "beta_list", tuple(float(v) for v in self.beta_list))

    def cells(self):
        for n in self.n_list:
            for beta in self.beta_list:
                yield n, beta


@dataclass(frozen=True)
class AggregateRow:
    kind: str
    n: int
    beta: float
    rho_w: float
    rho_r: float
    T: int
    strategy: str
    metric: str
    mean: float
    stderr: float
    trials: int

    @property
    def N(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    results: tuple
    aggregates: tuple
    infeasible: tuple = field(default=())


def _run_chunk(args) -> list:
    """Worker entry: run a batch of trials for one cell (picklable payload)."""
    kind, n, beta, rho_w, rho_r, blocks, strategy_value, trial_seeds = args
    config = CodeConfig(n=n, beta=beta, rho_w=rho_w, rho_r=rho_r, blocks=blocks)
    partition = build_partition(config)
    strategy = Strategy(strategy_value)
    runner = bounds_trial if kind == "bounds" else end_to_end_trial
    return [
        runner(config, partition, strategy, seed, trial)
        for trial, seed in trial_seeds
    ]


def _trial_metrics(r: TrialResult) -> dict:
    metrics = {"ber_bound": r.ber_bound, "leak_bound": r.leak_bound}
    if r.kind == "end_to_end":
        bits = r.message_bits or 0
        metrics["bob_ber"] = r.bob_bit_errors / bits if bits else 0.0
        metrics["eve_ber"] = r.eve_bit_errors / bits if bits else 0.0
        metrics["erased_decisions"] = float(r.erased_decisions)
    return metrics


def aggregate(results) -> tuple:
    """Order-independent per-cell mean and standard error of each metric."""
    cells = {}
    for r in results:
        cells.setdefault((r.n, r.beta), []).append(r)
    rows = []
    for (n, beta) in sorted(cells):
        group = sorted(cells[(n, beta)], key=lambda r: r.trial)
        names = list(_trial_metrics(group[0]))
        for metric in names:
            vals = np.array([_trial_metrics(r)[metric] for r in group], dtype=float)
            stderr = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
            first = group[0]
            rows.append(
                AggregateRow(
                    kind=first.kind,
                    n=n,
                    beta=beta,
                    rho_w=first.rho_w,
                    rho_r=first.rho_r,
                    T=first.T,
                    strategy=first.strategy,
                    metric=metric,
                    mean=float(vals.mean()),
                    stderr=stderr,
                    trials=len(vals),
                )
            )
    return tuple(rows)


def run_sweep(spec: SweepSpec, parallelism: int = 1) -> SweepResult:
    """Run every feasible cell of the grid; infeasible cells are recorded, not fatal.

    Results come back sorted by (n, beta, trial) no matter how the work was
    scheduled, so reruns at any parallelism level emit identical CSVs.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")

    tasks = []
    infeasible = []
    for n, beta in spec.cells():
        config = CodeConfig(
            n=n, beta=beta, rho_w=spec.rho_w, rho_r=spec.rho_r, blocks=spec.blocks
        )
        try:
            build_partition(config)
        except InfeasibleConstruction as exc:
            infeasible.append(
                {"n": n, "beta": beta, "i_size": exc.i_size, "b_size": exc.b_size}
            )
            continue
        trial_seeds = [
            (
                t,
                derive_trial_seed(
                    spec.base_seed, spec.kind, n, beta, spec.rho_w, spec.rho_r,
                    spec.blocks, spec.strategy, t,
                ),
            )
            for t in range(spec.trials)
        ]
        chunk = max(1, -(-len(trial_seeds) // max(parallelism, 1)))
        for lo in range(0, len(trial_seeds), chunk):
            tasks.append(
                (
                    spec.kind, n, beta, spec.rho_w, spec.rho_r, spec.blocks,
                    spec.strategy.value, trial_seeds[lo: lo + chunk],
                )
            )

    if parallelism == 1:
        batches = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            batches = list(pool.map(_run_chunk, tasks))

    results = sorted(
        (r for batch in batches for r in batch), key=lambda r: (r.n, r.beta, r.trial)
    )
    return SweepResult(
        spec=spec,
        results=tuple(results),
        aggregates=aggregate(results),
        infeasible=tuple(infeasible),
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trials_csv(results, file) -> None:
    writer = csv.writer(file)
    writer.writerow(TRIAL_COLUMNS)
    for r in results:
        writer.writerow(
            [
                r.kind, r.N, r.n, _fmt(r.beta), _fmt(r.rho_w), _fmt(r.rho_r),
                r.T, r.strategy, r.trial, r.seed, _fmt(r.ber_bound),
                _fmt(r.leak_bound), _fmt(r.bob_bit_errors), _fmt(r.eve_bit_errors),
                _fmt(r.message_bits), _fmt(r.erased_decisions),
            ]
        )


def read_trials_csv(file) -> list:
    """Parse a trials CSV back into TrialResult rows (audit fields empty)."""
    reader = csv.reader(file)
    header = next(reader)
    if header != TRIAL_COLUMNS:
        raise ValueError(f"unexpected trials CSV header: {header}")
    out = []
    for row in reader:
        rec = dict(zip(TRIAL_COLUMNS, row))
        out.append(
            TrialResult(
                kind=rec["kind"],
                n=int(rec["n"]),
                beta=float(rec["beta"]),
                rho_w=float(rec["rho_w"]),
                rho_r=float(rec["rho_r"]),
                T=int(rec["T"]),
                strategy=rec["strategy"],
                trial=int(rec["trial"]),
                seed=int(rec["seed"]),
                ber_bound=float(rec["ber_bound"]),
                leak_bound=float(rec["leak_bound"]),
                bob_bit_errors=int(rec["bob_bit_errors"]) if rec["bob_bit_errors"] else None,
                eve_bit_errors=int(rec["eve_bit_errors"]) if rec["eve_bit_errors"] else None,
                message_bits=int(rec["message_bits"]) if rec["message_bits"] else None,
                erased_decisions=(
                    int(rec["erased_decisions"]) if rec["erased_decisions"] else None
                ),
            )
        )
    return out


def write_aggregates_csv(rows, file) -> None:
    writer = csv.writer(file)
    writer.writerow(AGGREGATE_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.kind, r.N, r.n, _fmt(r.beta), _fmt(r.rho_w), _fmt(r.rho_r),
                r.T, r.strategy, r.metric, _fmt(r.mean), _fmt(r.stderr), r.trials,
            ]
        )


def read_aggregates_csv(file) -> list:
    reader = csv.reader(file)
    header = next(reader)
    if header != AGGREGATE_COLUMNS:
        raise ValueError(f"unexpected aggregate CSV header: {header}")
    out = []
    for row in reader:
        rec = dict(zip(AGGREGATE_COLUMNS, row))
        out.append(
            AggregateRow(
                kind=rec["kind"],
                n=int(rec["n"]),
                beta=float(rec["beta"]),
                rho_w=float(rec["rho_w"]),
                rho_r=float(rec["rho_r"]),
                T=int(rec["T"]),
                strategy=rec["strategy"],
                metric=rec["metric"],
                mean=float(rec["mean"]),
                stderr=float(rec["stderr"]),
                trials=int(rec["trials"]),
            )
        )
    return out
