//! Per-PRB exact scheduler.
//!
//! The joint assignment + muting problem on one PRB is a small 0/1 program
//! over *lifted* variables: one binary variable per (candidate UE, muting
//! scenario) pair, worth that scenario's PF metric if selected. Selecting a
//! variable occupies the UE's serving BS and mutes the scenario's BSs; a
//! muted BS must not serve anybody. Before solving, a lossless dominance
//! reduction shrinks the candidate set: among all (UE, scenario) pairs on
//! the same BS that request the *same* muting set, only the best-metric
//! pair can appear in an optimal solution, so everything else is dropped.
//!
//! Three independently coded routes answer the same question and are
//! cross-checked in tests:
//!
//! - [`solve_exact`]: depth-first branch-and-bound over the variables,
//! - [`solve_exhaustive`]: enumeration of per-BS choices,
//! - [`inlp_oracle`]: enumeration of all `2^M` muting columns of the
//!   original (unlifted) problem.

use crate::csi::CsiTable;
use crate::error::{Error, Result};
use crate::mask::BsMask;
use crate::network::ConnectionMatrix;
use crate::pf::{decision_objective, PfState, PrbDecision};

/// Relative inflation applied to branch-and-bound upper bounds so that
/// float rounding in the bound accumulation can never prune a leaf that
/// would beat the incumbent by a few ulps.
const BOUND_SLACK: f64 = 1e-12;

/// Muting-column budget guard for [`inlp_oracle`], which enumerates
/// `2^M` columns.
const ORACLE_MAX_BS: usize = 8;

/// Distinct muting sets requested per BS, with the (UE, scenario) pairs
/// that request each of them.
///
/// Every (UE, scenario) pair of a BS's served UEs lands in exactly one
/// group; UEs with different strongest-interferer sets can still share a
/// group when two of their scenarios mute the same BSs.
#[derive(Debug, Clone)]
pub struct UniqueIndicatorSets {
    /// Per BS: distinct muting masks, ordered by cardinality then members.
    sets: Vec<Vec<BsMask>>,
    /// Per BS, per mask: member (UE, scenario index) pairs, ascending UE.
    groups: Vec<Vec<Vec<(usize, usize)>>>,
}

impl UniqueIndicatorSets {
    pub fn num_bs(&self) -> usize {
        self.sets.len()
    }

    /// Distinct muting masks requested by UEs served by `bs`.
    pub fn sets(&self, bs: usize) -> &[BsMask] {
        &self.sets[bs]
    }

    /// (UE, scenario) pairs of `bs` whose scenario mutes exactly
    /// `self.sets(bs)[k]`.
    pub fn group(&self, bs: usize, k: usize) -> &[(usize, usize)] {
        &self.groups[bs][k]
    }

    /// Total number of distinct (BS, muting set) groups.
    pub fn total_sets(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }
}

/// Collect, per BS, the distinct muting sets its served UEs report, and
/// group the (UE, scenario) pairs by that set.
pub fn build_unique_sets(conn: &ConnectionMatrix, table: &CsiTable) -> UniqueIndicatorSets {
    let num_bs = conn.num_bs();
    let mut sets = Vec::with_capacity(num_bs);
    let mut groups = Vec::with_capacity(num_bs);
    for m in 0..num_bs {
        let mut distinct: Vec<BsMask> = Vec::new();
        for &n in conn.served_ues(m) {
            for &mask in table.scenario_masks(n) {
                if !distinct.contains(&mask) {
                    distinct.push(mask);
                }
            }
        }
        distinct.sort_by(|a, b| a.canonical_cmp(*b));
        let members = distinct
            .iter()
            .map(|&mask| {
                let mut group = Vec::new();
                for &n in conn.served_ues(m) {
                    for (j, &candidate) in table.scenario_masks(n).iter().enumerate() {
                        if candidate == mask {
                            group.push((n, j));
                        }
                    }
                }
                group
            })
            .collect();
        sets.push(distinct);
        groups.push(members);
    }
    UniqueIndicatorSets { sets, groups }
}

/// Outcome of the dominance reduction at one PRB: surviving candidate UEs
/// and their per-scenario PF coefficients, with dominated entries zeroed.
#[derive(Debug, Clone)]
pub struct CandidateReduction {
    candidates: Vec<usize>,
    coeffs: Vec<Vec<f64>>,
}

impl CandidateReduction {
    /// Surviving candidate UEs, ascending.
    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    /// PF coefficient per scenario of the k-th candidate. Entries are zero
    /// where the candidate lost its (BS, muting set) group.
    pub fn coeffs(&self, k: usize) -> &[f64] {
        &self.coeffs[k]
    }
}

/// Dominance reduction: within each (BS, muting set) group only the
/// highest-PF-metric (UE, scenario) pair survives (ties: lowest UE index);
/// every other pair's coefficient is zeroed. UEs left with no positive
/// coefficient drop out of the candidate set entirely.
///
/// The reduction is lossless: a dominated pair can always be swapped for
/// its group winner without changing feasibility, so the optimal objective
/// is unchanged.
pub fn reduce_candidates(
    conn: &ConnectionMatrix,
    table: &CsiTable,
    state: &PfState,
    unique: &UniqueIndicatorSets,
    prb: usize,
) -> CandidateReduction {
    let num_ue = conn.num_ue();
    let mut rows: Vec<Vec<f64>> = (0..num_ue)
        .map(|n| vec![0.0; table.scenario_masks(n).len()])
        .collect();
    for m in 0..conn.num_bs() {
        for k in 0..unique.sets(m).len() {
            let mut winner: Option<(usize, usize, f64)> = None;
            for &(n, j) in unique.group(m, k) {
                let metric = state.pf_metric(n, table.rate(n, prb, j));
                if metric > winner.map_or(0.0, |(_, _, best)| best) {
                    winner = Some((n, j, metric));
                }
            }
            if let Some((n, j, metric)) = winner {
                rows[n][j] = metric;
            }
        }
    }
    collect_candidates(rows)
}

/// PF coefficients for every (UE, scenario) pair with no dominance
/// filtering: the unreduced counterpart of [`reduce_candidates`], used to
/// verify that the reduction never changes the optimum.
pub fn unreduced_candidates(
    conn: &ConnectionMatrix,
    table: &CsiTable,
    state: &PfState,
    prb: usize,
) -> CandidateReduction {
    let rows = (0..conn.num_ue())
        .map(|n| {
            (0..table.scenario_masks(n).len())
                .map(|j| state.pf_metric(n, table.rate(n, prb, j)).max(0.0))
                .collect()
        })
        .collect();
    collect_candidates(rows)
}

fn collect_candidates(rows: Vec<Vec<f64>>) -> CandidateReduction {
    let mut candidates = Vec::new();
    let mut coeffs = Vec::new();
    for (n, row) in rows.into_iter().enumerate() {
        if row.iter().any(|&c| c > 0.0) {
            candidates.push(n);
            coeffs.push(row);
        }
    }
    CandidateReduction { candidates, coeffs }
}

/// One variable of the lifted per-PRB program: serve `ue` from its serving
/// BS while the BSs in `mask` stay silent, earning `coeff`.
#[derive(Debug, Clone)]
pub struct LiftedVar {
    pub ue: usize,
    pub serving_bs: usize,
    /// Scenario index within the UE's report list.
    pub scenario: usize,
    /// BSs this scenario requires to be muted.
    pub mask: BsMask,
    /// PF metric earned if selected; strictly positive.
    pub coeff: f64,
}

/// The per-PRB 0/1 program over lifted (UE, scenario) variables.
///
/// Variables are ordered by (UE, scenario) ascending. Zero-coefficient
/// pairs are never materialized: idling a BS is always at least as good,
/// and ties break toward idle. Objective ties between selections break
/// toward the lexicographically smallest selection vector in variable
/// order.
#[derive(Debug, Clone)]
pub struct PrbSubproblem {
    prb: usize,
    num_bs: usize,
    vars: Vec<LiftedVar>,
    candidates: Vec<usize>,
    noncoop_bs: Vec<usize>,
}

impl PrbSubproblem {
    pub fn prb(&self) -> usize {
        self.prb
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn vars(&self) -> &[LiftedVar] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Candidate UEs (ascending) that own at least one variable.
    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    /// BSs outside every candidate's strongest-interferer set. No variable
    /// can mute them; they only ever serve or idle.
    pub fn noncoop_bs(&self) -> &[usize] {
        &self.noncoop_bs
    }

    /// Plain-text dump for offline inspection. One header line
    /// (`prb P: C candidates, V variables, M BSs, non-cooperating BSs {..}`),
    /// one `candidates: ...` line, then one line per variable:
    /// `var I: ue N (bs M) scenario J mutes {..} coeff X`.
    pub fn dump_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let noncoop = BsMask::from_indices(self.noncoop_bs.iter().copied());
        writeln!(
            out,
            "prb {}: {} candidates, {} variables, {} BSs, non-cooperating BSs {:?}",
            self.prb,
            self.candidates.len(),
            self.vars.len(),
            self.num_bs,
            noncoop
        )
        .unwrap();
        let listed: Vec<String> = self.candidates.iter().map(|n| n.to_string()).collect();
        writeln!(out, "candidates: {}", listed.join(" ")).unwrap();
        for (i, v) in self.vars.iter().enumerate() {
            writeln!(
                out,
                "var {}: ue {} (bs {}) scenario {} mutes {:?} coeff {}",
                i, v.ue, v.serving_bs, v.scenario, v.mask, v.coeff
            )
            .unwrap();
        }
        out
    }
}

fn assemble_subproblem(
    conn: &ConnectionMatrix,
    table: &CsiTable,
    prb: usize,
    reduction: CandidateReduction,
) -> PrbSubproblem {
    let mut vars = Vec::new();
    for (k, &n) in reduction.candidates.iter().enumerate() {
        for (j, &coeff) in reduction.coeffs[k].iter().enumerate() {
            if coeff > 0.0 {
                vars.push(LiftedVar {
                    ue: n,
                    serving_bs: conn.serving_bs(n),
                    scenario: j,
                    mask: table.scenario_mask(n, j),
                    coeff,
                });
            }
        }
    }
    let mutable = reduction
        .candidates
        .iter()
        .fold(BsMask::EMPTY, |acc, &n| acc.union(table.strongest_mask(n)));
    let noncoop_bs = (0..conn.num_bs()).filter(|&m| !mutable.contains(m)).collect();
    PrbSubproblem {
        prb,
        num_bs: conn.num_bs(),
        vars,
        candidates: reduction.candidates,
        noncoop_bs,
    }
}

/// Build the reduced per-PRB program (the production path).
pub fn build_subproblem(
    conn: &ConnectionMatrix,
    table: &CsiTable,
    state: &PfState,
    prb: usize,
) -> PrbSubproblem {
    let unique = build_unique_sets(conn, table);
    let reduction = reduce_candidates(conn, table, state, &unique, prb);
    assemble_subproblem(conn, table, prb, reduction)
}

/// Build the same program without the dominance reduction (every UE, every
/// positive-metric scenario). Solving both must give the same objective.
pub fn build_subproblem_unreduced(
    conn: &ConnectionMatrix,
    table: &CsiTable,
    state: &PfState,
    prb: usize,
) -> PrbSubproblem {
    let reduction = unreduced_candidates(conn, table, state, prb);
    assemble_subproblem(conn, table, prb, reduction)
}

/// Selected variable indices (ascending) plus the objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSolution {
    pub selected: Vec<usize>,
    pub objective: f64,
}

impl LiftedSolution {
    pub fn empty() -> Self {
        LiftedSolution { selected: Vec::new(), objective: 0.0 }
    }
}

struct SearchCtx<'a> {
    vars: &'a [LiftedVar],
    num_bs: usize,
    /// `suffix_best[i][m]`: largest coefficient among `vars[i..]` served by
    /// BS `m` (0 when none).
    suffix_best: Vec<Vec<f64>>,
}

/// Exact solve by depth-first branch-and-bound over the variables in
/// order, exploring the "not selected" branch first.
///
/// Leaves are therefore visited in ascending lexicographic order of the
/// selection vector, so keeping the first strictly improving leaf yields
/// the lexicographically smallest optimal vector. The bound relaxes all
/// future muting interactions — every still-available BS contributes its
/// best remaining coefficient — and is inflated by a hair so float
/// rounding cannot prune an equal-or-better leaf.
pub fn solve_exact(problem: &PrbSubproblem) -> LiftedSolution {
    let vars = problem.vars();
    let nv = vars.len();
    let num_bs = problem.num_bs();
    let mut suffix_best = vec![vec![0.0f64; num_bs]; nv + 1];
    for i in (0..nv).rev() {
        suffix_best[i] = suffix_best[i + 1].clone();
        let v = &vars[i];
        if v.coeff > suffix_best[i][v.serving_bs] {
            suffix_best[i][v.serving_bs] = v.coeff;
        }
    }
    let ctx = SearchCtx { vars, num_bs, suffix_best };
    let mut best = LiftedSolution::empty();
    let mut picked = Vec::new();
    branch(&ctx, 0, 0.0, BsMask::EMPTY, BsMask::EMPTY, &mut picked, &mut best);
    best
}

fn branch(
    ctx: &SearchCtx<'_>,
    idx: usize,
    value: f64,
    busy: BsMask,
    muted: BsMask,
    picked: &mut Vec<usize>,
    best: &mut LiftedSolution,
) {
    if idx == ctx.vars.len() {
        if value > best.objective {
            best.objective = value;
            best.selected = picked.clone();
        }
        return;
    }
    let mut bound = value;
    for m in 0..ctx.num_bs {
        if !busy.contains(m) && !muted.contains(m) {
            bound += ctx.suffix_best[idx][m];
        }
    }
    if bound * (1.0 + BOUND_SLACK) <= best.objective {
        return;
    }
    branch(ctx, idx + 1, value, busy, muted, picked, best);
    let v = &ctx.vars[idx];
    debug_assert!(!v.mask.contains(v.serving_bs));
    let feasible = !busy.contains(v.serving_bs)
        && !muted.contains(v.serving_bs)
        && !v.mask.overlaps(busy);
    if feasible {
        picked.push(idx);
        branch(
            ctx,
            idx + 1,
            value + v.coeff,
            busy.with(v.serving_bs),
            muted.union(v.mask),
            picked,
            best,
        );
        picked.pop();
    }
}

/// `true` when selection vector `a` is lexicographically smaller than `b`
/// in variable order. Both are ascending lists of selected indices; the
/// vector with a 0 at the first differing position wins, i.e. the earliest
/// index in the symmetric difference decides against its owner.
fn lex_less(a: &[usize], b: &[usize]) -> bool {
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => return false,
            std::cmp::Ordering::Greater => return true,
        }
    }
    j < b.len()
}

/// Exact solve by brute force: every BS independently idles or takes one
/// of its variables; all combinations are checked for muting consistency.
///
/// Independent of [`solve_exact`] in both enumeration structure and
/// tie-breaking mechanism (explicit value-then-lex comparison instead of
/// visit order), which is the point: the two must agree exactly.
pub fn solve_exhaustive(problem: &PrbSubproblem) -> LiftedSolution {
    let vars = problem.vars();
    let mut by_bs: Vec<Vec<usize>> = vec![Vec::new(); problem.num_bs()];
    for (i, v) in vars.iter().enumerate() {
        by_bs[v.serving_bs].push(i);
    }
    let options: Vec<Vec<usize>> = by_bs.into_iter().filter(|o| !o.is_empty()).collect();
    let mut best = LiftedSolution::empty();
    let mut choice: Vec<Option<usize>> = vec![None; options.len()];
    exhaust(vars, &options, 0, &mut choice, &mut best);
    best
}

fn exhaust(
    vars: &[LiftedVar],
    options: &[Vec<usize>],
    depth: usize,
    choice: &mut Vec<Option<usize>>,
    best: &mut LiftedSolution,
) {
    if depth == options.len() {
        let mut selected: Vec<usize> = choice.iter().flatten().copied().collect();
        selected.sort_unstable();
        let busy = BsMask::from_indices(selected.iter().map(|&i| vars[i].serving_bs));
        if selected.iter().any(|&i| vars[i].mask.overlaps(busy)) {
            return;
        }
        let mut value = 0.0;
        for &i in &selected {
            value += vars[i].coeff;
        }
        if value > best.objective
            || (value == best.objective && lex_less(&selected, &best.selected))
        {
            best.objective = value;
            best.selected = selected;
        }
        return;
    }
    choice[depth] = None;
    exhaust(vars, options, depth + 1, choice, best);
    for &i in &options[depth] {
        choice[depth] = Some(i);
        exhaust(vars, options, depth + 1, choice, best);
    }
    choice[depth] = None;
}

/// Translate a lifted solution back into a per-PRB decision slice:
/// scheduled UEs plus the union of the selected scenarios' muting sets.
/// BSs neither scheduled nor muted are left transmitting with no
/// assignment.
pub fn decode_decision(problem: &PrbSubproblem, solution: &LiftedSolution) -> Result<PrbDecision> {
    let vars = problem.vars();
    let mut scheduled = Vec::with_capacity(solution.selected.len());
    let mut busy = BsMask::EMPTY;
    let mut muted = BsMask::EMPTY;
    for &i in &solution.selected {
        let v = vars.get(i).ok_or(Error::IndexOutOfRange {
            what: "variable",
            index: i,
            limit: vars.len(),
        })?;
        if busy.contains(v.serving_bs) {
            return Err(Error::Infeasible { bs: v.serving_bs, prb: problem.prb });
        }
        busy = busy.with(v.serving_bs);
        muted = muted.union(v.mask);
        scheduled.push(v.ue);
    }
    if muted.overlaps(busy) {
        let bs = muted.intersect(busy).members().next().unwrap();
        return Err(Error::Infeasible { bs, prb: problem.prb });
    }
    scheduled.sort_unstable();
    Ok(PrbDecision { scheduled, muted })
}

/// Brute-force optimum of the original joint problem: every one of the
/// `2^M` muting columns, each transmitting BS greedily serving its
/// best-positive-metric UE under that column. Ties between columns keep
/// the numerically smallest column bitmask (checked first).
///
/// Enumerates `2^M` columns, hence the BS-count guard. This is the
/// independent reference the lifted solver is validated against.
pub fn inlp_oracle_decision(
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
    prb: usize,
) -> Result<(PrbDecision, f64)> {
    let num_bs = conn.num_bs();
    if num_bs > ORACLE_MAX_BS {
        return Err(Error::config(format!(
            "joint brute force enumerates 2^M columns; M = {num_bs} exceeds the guard of {ORACLE_MAX_BS}"
        )));
    }
    let mut best = (PrbDecision::idle(), 0.0f64);
    for bits in 0..(1u64 << num_bs) {
        let column = BsMask::from_bits(bits);
        let slice = crate::pf::greedy_column_slice(table, conn, state, prb, column);
        let objective = decision_objective(table, state, prb, &slice);
        if objective > best.1 {
            best = (slice, objective);
        }
    }
    Ok(best)
}

/// Objective value of [`inlp_oracle_decision`].
pub fn inlp_oracle(
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
    prb: usize,
) -> Result<f64> {
    inlp_oracle_decision(table, conn, state, prb).map(|(_, objective)| objective)
}
