//! Randomized congruence testing: bisimilar terms placed in the same
//! one-hole context must stay bisimilar.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{explore, DerivationBudget, EngineError};
use crate::syntax::{OpDecl, Param, ParamKind, Term, Var};
use crate::weights::Weight;
use crate::wfsos::WfsosSpec;

use super::coarsest_bisimulation;

/// The hole of a context.
const HOLE: &str = "_";

/// Random ground terms and one-hole contexts.
pub trait TermGenerator: Sync {
    fn term(&self, rng: &mut dyn RngCore, depth: usize) -> Term;
    /// A context whose hole is the process variable `_`.
    fn context(&self, rng: &mut dyn RngCore, depth: usize) -> Option<Term>;
}

/// Draws operators of the process signature with random parameters.
#[derive(Debug, Clone)]
pub struct SigmaGenerator {
    ops: Vec<OpDecl>,
    constants: Vec<String>,
    labels: Vec<String>,
    /// Labels allowed in label-set parameters.
    pub set_labels: Vec<String>,
    pub weights: Vec<String>,
}

impl SigmaGenerator {
    pub fn new<W: Weight>(spec: &WfsosSpec<W>) -> Self {
        SigmaGenerator {
            ops: spec.sigma.ops().filter(|d| !d.variadic).cloned().collect(),
            constants: spec.defs.keys().cloned().collect(),
            labels: spec.labels.clone(),
            set_labels: spec.labels.clone(),
            weights: ["1", "2", "3", "1/2"].iter().map(|s| s.to_string()).collect(),
        }
    }

    fn usable(&self, d: &OpDecl) -> bool {
        !d.unfold || !self.constants.is_empty()
    }

    fn param(&self, rng: &mut dyn RngCore, d: &OpDecl, k: ParamKind) -> Param {
        match k {
            ParamKind::Label => Param::Name(self.labels.choose(rng).expect("labels").clone()),
            ParamKind::Weight | ParamKind::Any => Param::Weight(self.weights.choose(rng).expect("weights").clone()),
            ParamKind::Labels => {
                Param::Set(self.set_labels.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect::<BTreeSet<_>>())
            }
            ParamKind::Name if d.unfold => Param::Name(self.constants.choose(rng).expect("constants").clone()),
            ParamKind::Name => Param::Name(self.labels.choose(rng).expect("labels").clone()),
        }
    }

    fn node(&self, rng: &mut dyn RngCore, d: &OpDecl, args: Vec<Term>) -> Term {
        let params = d.params.iter().map(|&k| self.param(rng, d, k)).collect();
        Term::app(d.name.clone(), params, args)
    }
}

impl TermGenerator for SigmaGenerator {
    fn term(&self, rng: &mut dyn RngCore, depth: usize) -> Term {
        let pool: Vec<&OpDecl> =
            self.ops.iter().filter(|d| self.usable(d) && (depth > 0 || d.unfold || d.arity == 0)).collect();
        let d = *pool.choose(rng).expect("a constant operator");
        let args = if d.unfold { vec![] } else { (0..d.arity).map(|_| self.term(rng, depth.saturating_sub(1))).collect() };
        self.node(rng, d, args)
    }

    fn context(&self, rng: &mut dyn RngCore, depth: usize) -> Option<Term> {
        let pool: Vec<&OpDecl> = self.ops.iter().filter(|d| !d.unfold && d.arity > 0).collect();
        let d = *pool.choose(rng)?;
        let hole = rng.gen_range(0..d.arity);
        let args = (0..d.arity)
            .map(|i| if i == hole { Term::var(HOLE) } else { self.term(rng, depth.saturating_sub(1)) })
            .collect();
        Some(self.node(rng, d, args))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceConfig {
    pub trials: usize,
    pub seed: u64,
    /// Depth of random terms.
    pub depth: usize,
    /// Random terms explored together when looking for a bisimilar pair.
    pub batch: usize,
    /// Contexts tried per pair.
    pub contexts: usize,
    pub budget: DerivationBudget,
    pub jobs: usize,
}

impl Default for CongruenceConfig {
    fn default() -> Self {
        CongruenceConfig {
            trials: 200,
            seed: 0,
            depth: 3,
            batch: 6,
            contexts: 3,
            budget: DerivationBudget { max_states: 2_000, ..DerivationBudget::default() },
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub p: Term,
    pub q: Term,
    pub context: Term,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CongruenceReport {
    pub trials: usize,
    /// Trials whose pair consisted of two different terms.
    pub distinct_pairs: usize,
    pub contexts_checked: usize,
    /// Trials abandoned because a state space exceeded the budget.
    pub skipped: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl CongruenceReport {
    fn absorb(&mut self, t: TrialOutcome) {
        self.trials += 1;
        match t {
            TrialOutcome::Skipped => self.skipped += 1,
            TrialOutcome::Done { distinct, contexts, counterexamples } => {
                self.distinct_pairs += usize::from(distinct);
                self.contexts_checked += contexts;
                self.counterexamples.extend(counterexamples);
            }
        }
    }
}

enum TrialOutcome {
    Skipped,
    Done { distinct: bool, contexts: usize, counterexamples: Vec<Counterexample> },
}

fn bisimilar<W: Weight>(spec: &WfsosSpec<W>, p: &Term, q: &Term, budget: DerivationBudget) -> Result<bool, EngineError> {
    let ex = explore(spec, &[p.clone(), q.clone()], budget)?;
    let part = coarsest_bisimulation(&ex.ultras);
    Ok(part.same_block(ex.state_of(p).expect("root"), ex.state_of(q).expect("root")))
}

fn trial<W: Weight>(spec: &WfsosSpec<W>, gen: &dyn TermGenerator, cfg: &CongruenceConfig, index: usize) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
    let roots: Vec<Term> = (0..cfg.batch.max(1)).map(|_| gen.term(&mut rng, cfg.depth)).collect();
    let Ok(ex) = explore(spec, &roots, cfg.budget) else { return TrialOutcome::Skipped };
    let part = coarsest_bisimulation(&ex.ultras);
    let pairs: Vec<(usize, usize)> = part
        .blocks()
        .iter()
        .flat_map(|b| b.iter().flat_map(move |&x| b.iter().filter(move |&&y| x < y).map(move |&y| (x, y))))
        .collect();
    let (p, q) = match pairs.choose(&mut rng) {
        Some(&(x, y)) => (ex.terms[x].clone(), ex.terms[y].clone()),
        None => (roots[0].clone(), roots[0].clone()),
    };
    let mut counterexamples = vec![];
    let mut contexts = 0;
    for _ in 0..cfg.contexts {
        let Some(ctx) = gen.context(&mut rng, cfg.depth) else { break };
        let plug = |t: &Term| {
            ctx.apply_subst(&[(Var::proc(HOLE), t.clone())].into_iter().collect(), false).expect("non-strict")
        };
        match bisimilar(spec, &plug(&p), &plug(&q), cfg.budget) {
            Ok(true) => contexts += 1,
            Ok(false) => {
                contexts += 1;
                counterexamples.push(Counterexample { trial: index, p: p.clone(), q: q.clone(), context: ctx });
            }
            Err(_) => {}
        }
    }
    TrialOutcome::Done { distinct: p != q, contexts, counterexamples }
}

/// Runs `cfg.trials` trials. Trial `i` uses its own generator seeded with
/// `seed + i`, so the report does not depend on `jobs`.
pub fn congruence_suite<W: Weight>(spec: &WfsosSpec<W>, gen: &dyn TermGenerator, cfg: &CongruenceConfig) -> CongruenceReport {
    let jobs = cfg.jobs.max(1);
    let mut outcomes: Vec<Option<TrialOutcome>> = (0..cfg.trials).map(|_| None).collect();
    std::thread::scope(|s| {
        for (j, chunk) in outcomes.chunks_mut(cfg.trials.div_ceil(jobs).max(1)).enumerate() {
            let start = j * cfg.trials.div_ceil(jobs).max(1);
            s.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(trial(spec, gen, cfg, start + k));
                }
            });
        }
    });
    let mut report = CongruenceReport::default();
    for o in outcomes.into_iter().flatten() {
        report.absorb(o);
    }
    report
}
