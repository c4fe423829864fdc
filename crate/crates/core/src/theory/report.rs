use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    check_proof_quantities, consistency, decimal, discontinuity_bound, random_consistent_family, search_max_agreement,
    Rational, SearchConfig, SearchResult, TheoryError,
};

/// Largest `N` for which `2^{-3N}` is representable.
pub const MAX_REPORT_BUDGET: usize = 40;

/// Measured quantities for one `(K, N)`: proof checks on sampled consistent
/// families and the best agreement found by the search.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub depth: u32,
    pub families: usize,
    pub families_passed: usize,
    pub min_consistency: Rational,
    pub max_discontinuities: usize,
    pub bound: Rational,
    pub search: SearchResult,
    /// `1 − 3·2^{-3N}`, reported only.
    pub claimed_bound: Rational,
    /// `(1/3)·2^{-(⌊L⌋+1)}`, the disagreement a step function with `⌊L⌋`
    /// jumps cannot avoid.
    pub restated_gap: Rational,
}

impl TheoryReport {
    pub fn proof_checks_pass(&self) -> bool {
        self.families_passed == self.families
    }

    pub fn below_one(&self) -> bool {
        self.search.agreement < Rational::from_integer(1)
    }

    pub fn restated_bound_holds(&self) -> bool {
        Rational::from_integer(1) - self.search.agreement >= self.restated_gap
    }

    pub fn claimed_bound_holds(&self) -> bool {
        self.search.agreement < self.claimed_bound
    }
}

/// Builds a report from `families` random consistent families on the grid of
/// `config.depth` and a search with `config`.
pub fn theory_report(k: usize, n: usize, families: usize, config: &SearchConfig) -> Result<TheoryReport, TheoryError> {
    let bound = discontinuity_bound(k, n)?;
    if n > MAX_REPORT_BUDGET {
        return Err(TheoryError::TooLarge("size budget"));
    }
    let floor_l = bound.floor().to_integer().max(0) as u32;
    if floor_l + 2 > 120 {
        return Err(TheoryError::TooLarge("discontinuity bound"));
    }
    let search = search_max_agreement(n, k, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let grid_depth = config.depth.min(12);
    let mut passed = 0;
    let mut min_consistency = Rational::from_integer(1);
    let mut max_discontinuities = 0;
    for _ in 0..families {
        let family = random_consistent_family(&mut rng, k, n, grid_depth);
        let check = check_proof_quantities(&family)?;
        passed += usize::from(check.holds());
        min_consistency = min_consistency.min(consistency(&family));
        max_discontinuities = max_discontinuities.max(check.discontinuities);
    }
    Ok(TheoryReport {
        k,
        n,
        seed: config.seed,
        depth: config.depth,
        families,
        families_passed: passed,
        min_consistency,
        max_discontinuities,
        bound,
        search,
        claimed_bound: Rational::from_integer(1) - Rational::new(3, 1i128 << (3 * n)),
        restated_gap: Rational::new(1, 3 * (1i128 << (floor_l + 1))),
    })
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn fraction(r: &Rational) -> alloc::string::String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for TheoryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K = {}", self.k)?;
        writeln!(f, "N = {}", self.n)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "depth = {}", self.depth)?;
        writeln!(f, "families_checked = {}", self.families)?;
        writeln!(f, "families_passed = {}", self.families_passed)?;
        writeln!(f, "min_consistency = {}", fraction(&self.min_consistency))?;
        writeln!(f, "max_disc_count = {}", self.max_discontinuities)?;
        writeln!(f, "L = {} ({})", fraction(&self.bound), decimal(&self.bound, 4))?;
        writeln!(f, "search_mode = {:?}", self.search.mode)?;
        writeln!(f, "candidates_evaluated = {}", self.search.evaluated)?;
        writeln!(f, "best_g = {}", self.search.best)?;
        writeln!(f, "best_g_disc_count = {}", self.search.best.discontinuities())?;
        writeln!(f, "agreement = {} ({})", fraction(&self.search.agreement), decimal(&self.search.agreement, 12))?;
        writeln!(f, "claimed_bound = {} ({})", fraction(&self.claimed_bound), decimal(&self.claimed_bound, 12))?;
        let restated = Rational::from_integer(1) - self.restated_gap;
        writeln!(f, "restated_bound = {} ({})", fraction(&restated), decimal(&restated, 12))?;
        writeln!(f, "proof_checks = {}", flag(self.proof_checks_pass()))?;
        writeln!(f, "agreement_below_one = {}", flag(self.below_one()))?;
        writeln!(f, "restated_bound_holds = {}", flag(self.restated_bound_holds()))?;
        writeln!(f, "claimed_bound_holds = {} (reported, not asserted)", flag(self.claimed_bound_holds()))
    }
}
