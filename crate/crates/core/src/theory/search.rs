use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{agreement_measure, discontinuity_bound, Dyadic, Rational, StepFunction, TheoryError, MAX_EXPONENT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Exhaustive when the candidate count fits the budget, else random.
    Auto,
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Breakpoints are drawn from `{2^{-1}, …, 2^{-depth}}`.
    pub depth: u32,
    pub mode: SearchMode,
    /// Largest number of candidates exhaustive mode may evaluate.
    pub budget: u64,
    pub restarts: u32,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { depth: 8, mode: SearchMode::Auto, budget: 1 << 20, restarts: 32, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: StepFunction,
    pub agreement: Rational,
    /// `⌊L⌋`, the discontinuity allowance searched.
    pub max_discontinuities: usize,
    /// Mode actually run.
    pub mode: SearchMode,
    pub evaluated: u64,
}

/// A candidate: chosen exponents (ascending) and the value on `(1/2^{e_1}, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    exponents: Vec<u32>,
    top: bool,
}

impl Candidate {
    fn function(&self) -> StepFunction {
        let breakpoints = self.exponents.iter().map(|&e| Dyadic::pow2_neg(e).expect("depth checked")).collect();
        StepFunction::alternating(breakpoints, self.top).expect("distinct ascending exponents")
    }
}

/// Larger agreement first; ties go to the lexicographically smallest
/// breakpoint list, then to top value 0.
fn better(a: &(Rational, StepFunction), b: &(Rational, StepFunction)) -> bool {
    match a.0.cmp(&b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => (a.1.breakpoints(), a.1.values()) < (b.1.breakpoints(), b.1.values()),
    }
}

fn binomial_sum(d: u32, m: usize) -> u128 {
    let mut total = 1u128;
    let mut c = 1u128;
    for s in 1..=(m.min(d as usize) as u128) {
        c = c * (d as u128 - s + 1) / s;
        total += c;
    }
    total
}

fn allowance(n: usize, k: usize) -> Result<usize, TheoryError> {
    if n == 0 {
        return Err(TheoryError::ZeroBudget);
    }
    Ok(discontinuity_bound(k, n)?.floor().to_integer().max(0) as usize)
}

fn check_depth(depth: u32) -> Result<(), TheoryError> {
    if depth == 0 || depth > MAX_EXPONENT {
        return Err(TheoryError::InvalidDepth(depth));
    }
    Ok(())
}

/// Best agreement with the target over step functions whose breakpoints lie
/// in `{2^{-1}, …, 2^{-depth}}` and that have at most
/// `⌊discontinuity_bound(K, N)⌋` discontinuities.
pub fn search_max_agreement(n: usize, k: usize, config: &SearchConfig) -> Result<SearchResult, TheoryError> {
    check_depth(config.depth)?;
    let m = allowance(n, k)?;
    let candidates = 2 * binomial_sum(config.depth, m);
    let mode = match config.mode {
        SearchMode::Auto if candidates <= config.budget as u128 => SearchMode::Exhaustive,
        SearchMode::Auto => SearchMode::Random,
        SearchMode::Exhaustive if candidates > config.budget as u128 => {
            return Err(TheoryError::BudgetExceeded { candidates, budget: config.budget });
        }
        other => other,
    };
    let (best, evaluated) = match mode {
        SearchMode::Exhaustive => exhaustive(config.depth, m),
        _ => {
            let mut best: Option<(Rational, StepFunction)> = None;
            let mut evaluated = 0;
            for r in 0..config.restarts.max(1) {
                let (found, count) = search_restart(m, config, r);
                evaluated += count;
                if best.as_ref().is_none_or(|b| better(&found, b)) {
                    best = Some(found);
                }
            }
            (best.expect("at least one restart"), evaluated)
        }
    };
    Ok(SearchResult { agreement: best.0, best: best.1, max_discontinuities: m, mode, evaluated })
}

fn exhaustive(depth: u32, m: usize) -> ((Rational, StepFunction), u64) {
    let mut best: Option<(Rational, StepFunction)> = None;
    let mut evaluated = 0u64;
    let mut chosen = Vec::new();
    let mut visit = |exponents: &[u32]| {
        for top in [false, true] {
            let g = Candidate { exponents: exponents.to_vec(), top }.function();
            let found = (agreement_measure(&g), g);
            evaluated += 1;
            if best.as_ref().is_none_or(|b| better(&found, b)) {
                best = Some(found);
            }
        }
    };
    subsets(1, depth, m, &mut chosen, &mut visit);
    (best.expect("the empty subset is always visited"), evaluated)
}

fn subsets(next: u32, depth: u32, m: usize, chosen: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    visit(chosen);
    if chosen.len() == m {
        return;
    }
    for e in next..=depth {
        chosen.push(e);
        subsets(e + 1, depth, m, chosen, visit);
        chosen.pop();
    }
}

/// One seeded hill climb from a random start: repeatedly takes the best
/// single toggle of a breakpoint or of the top value. Restart `r` uses
/// stream `r` of the configured seed, so restarts can run in any order.
pub fn search_restart(m: usize, config: &SearchConfig, r: u32) -> ((Rational, StepFunction), u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(r as u64);
    let depth = config.depth;
    let size = rng.gen_range(0..=m.min(depth as usize));
    let mut exponents: Vec<u32> = sample(&mut rng, depth as usize, size).into_iter().map(|e| e as u32 + 1).collect();
    exponents.sort_unstable();
    let mut current = Candidate { exponents, top: rng.gen() };
    let mut score = {
        let g = current.function();
        (agreement_measure(&g), g)
    };
    let mut evaluated = 1u64;
    loop {
        let mut step: Option<(Candidate, (Rational, StepFunction))> = None;
        let flips = (1..=depth).map(Some).chain(core::iter::once(None));
        for flip in flips {
            let mut next = current.clone();
            match flip {
                None => next.top = !next.top,
                Some(e) => match next.exponents.binary_search(&e) {
                    Ok(i) => {
                        next.exponents.remove(i);
                    }
                    Err(_) if next.exponents.len() == m => continue,
                    Err(i) => next.exponents.insert(i, e),
                },
            }
            let g = next.function();
            let found = (agreement_measure(&g), g);
            evaluated += 1;
            let target = step.as_ref().map_or(&score, |s| &s.1);
            if better(&found, target) {
                step = Some((next, found));
            }
        }
        match step {
            Some((next, found)) => {
                current = next;
                score = found;
            }
            None => return (score, evaluated),
        }
    }
}
