use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;

use super::{Dyadic, Rational, StepFunction, TheoryError};

/// `K` step-function classifiers, each with at most `N` discontinuities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    members: Vec<StepFunction>,
    budget: usize,
}

impl Family {
    pub fn new(members: Vec<StepFunction>, budget: usize) -> Result<Self, TheoryError> {
        if members.is_empty() {
            return Err(TheoryError::EmptyFamily);
        }
        for (member, f) in members.iter().enumerate() {
            let discontinuities = f.discontinuities();
            if discontinuities > budget {
                return Err(TheoryError::SizeBudget { member, discontinuities, budget });
            }
        }
        Ok(Self { members, budget })
    }

    pub fn members(&self) -> &[StepFunction] {
        &self.members
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }
}

/// Common refinement of the members' pieces with the number of members equal
/// to 1 on each piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteProfile {
    pub merged_breakpoints: Vec<Dyadic>,
    pub ones_count: Vec<usize>,
}

pub fn vote_profile(family: &Family) -> VoteProfile {
    let merged: BTreeSet<Dyadic> = family.members.iter().flat_map(|f| f.breakpoints().iter().copied()).collect();
    let merged_breakpoints: Vec<Dyadic> = merged.into_iter().rev().collect();
    // every piece is right-closed, so its top endpoint is a representative
    let tops = core::iter::once(Dyadic::ONE).chain(merged_breakpoints.iter().copied());
    let ones_count = tops
        .map(|top| {
            let x = top.to_rational();
            family.members.iter().filter(|f| f.eval(&x).unwrap_or(false)).count()
        })
        .collect();
    VoteProfile { merged_breakpoints, ones_count }
}

fn majority(ones: usize, k: usize) -> bool {
    2 * ones >= k
}

/// `g_F`: 1 where at least half the members are 1, coalesced so its
/// breakpoints are exactly its discontinuities.
pub fn ensemble(family: &Family) -> StepFunction {
    let profile = vote_profile(family);
    let values = profile.ones_count.iter().map(|&u| majority(u, family.k())).collect();
    StepFunction::new(profile.merged_breakpoints, values).expect("merged breakpoints are valid").coalesced()
}

/// Minimum over `(0, 1]` of the share of members agreeing with the majority.
pub fn consistency(family: &Family) -> Rational {
    let k = family.k();
    let worst = vote_profile(family).ones_count.iter().map(|&u| u.max(k - u)).min().unwrap_or(k);
    Rational::new(worst as i128, k as i128)
}

/// `L = KN / (2⌊K/4⌋) − 1`.
pub fn discontinuity_bound(k: usize, n: usize) -> Result<Rational, TheoryError> {
    if k < 4 {
        return Err(TheoryError::KTooSmall(k));
    }
    Ok(Rational::new((k * n) as i128, (2 * (k / 4)) as i128) - Rational::from_integer(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail,
    NotApplicable,
}

impl Check {
    fn of(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Check::Pass => "pass",
            Check::Fail => "FAIL",
            Check::NotApplicable => "n/a",
        }
    }
}

/// Jump sizes and the counting inequalities for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofCheck {
    pub k: usize,
    pub n: usize,
    pub consistency: Rational,
    pub bound: Rational,
    /// Each discontinuity of `g_F` with `Δ = |U_{i+1} − U_i|` across it.
    pub jumps: Vec<(Dyadic, usize)>,
    /// `Δ ≥ 2⌊K/4⌋` at every jump, applicable when consistency > 3/4.
    pub jump_check: Check,
    /// First jump violating `jump_check`.
    pub witness: Option<Dyadic>,
    /// `Σ Δ` over all transitions of the vote profile.
    pub delta_sum: usize,
    /// `Σ Δ ≤ KN`.
    pub sum_check: Check,
    pub discontinuities: usize,
    /// `disc(g_F) ≤ ⌊L⌋`, applicable when consistency > 3/4.
    pub count_check: Check,
}

impl ProofCheck {
    pub fn holds(&self) -> bool {
        [self.jump_check, self.sum_check, self.count_check].iter().all(|c| *c != Check::Fail)
    }
}

pub fn check_proof_quantities(family: &Family) -> Result<ProofCheck, TheoryError> {
    let (k, n) = (family.k(), family.budget());
    let bound = discontinuity_bound(k, n)?;
    let profile = vote_profile(family);
    let g = ensemble(family);
    let delta = |i: usize| profile.ones_count[i].abs_diff(profile.ones_count[i + 1]);
    let jumps: Vec<(Dyadic, usize)> = g
        .breakpoints()
        .iter()
        .map(|b| {
            let i = profile.merged_breakpoints.iter().position(|m| m == b).expect("jump lies on a member breakpoint");
            (*b, delta(i))
        })
        .collect();
    let consistency = consistency(family);
    let applicable = consistency > Rational::new(3, 4);
    let witness = jumps.iter().find(|(_, d)| *d < 2 * (k / 4)).map(|(b, _)| *b);
    let delta_sum = (0..profile.merged_breakpoints.len()).map(delta).sum();
    let discontinuities = g.discontinuities();
    let floor_l = bound.floor().to_integer().max(0) as usize;
    let conditional = |ok: bool| if applicable { Check::of(ok) } else { Check::NotApplicable };
    Ok(ProofCheck {
        k,
        n,
        consistency,
        bound,
        jump_check: conditional(witness.is_none()),
        witness: witness.filter(|_| applicable),
        jumps,
        delta_sum,
        sum_check: Check::of(delta_sum <= k * n),
        discontinuities,
        count_check: conditional(discontinuities <= floor_l),
    })
}

/// A random member with at most `budget` breakpoints on the grid
/// `j / 2^depth` and independent random piece values.
pub fn random_step_function<R: Rng + ?Sized>(rng: &mut R, budget: usize, depth: u32) -> StepFunction {
    let grid = (1usize << depth) - 1;
    let count = rng.gen_range(0..=budget.min(grid));
    let mut points: Vec<usize> = sample(rng, grid, count).into_iter().map(|j| j + 1).collect();
    points.sort_unstable_by(|a, b| b.cmp(a));
    let breakpoints = points.into_iter().map(|j| Dyadic::new(j as u128, depth).expect("grid point")).collect();
    let values = (0..=count).map(|_| rng.gen()).collect();
    StepFunction::new(breakpoints, values).expect("sorted distinct grid points")
}

/// `K − m` copies of a random consensus member plus `m < K/4` random
/// dissenters, so the consistency exceeds 3/4.
pub fn random_consistent_family<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize, depth: u32) -> Family {
    let consensus = random_step_function(rng, n, depth);
    let max_dissent = (k - 1) / 4;
    let dissenters = rng.gen_range(0..=max_dissent);
    let mut members = alloc::vec![consensus; k - dissenters];
    members.extend((0..dissenters).map(|_| random_step_function(rng, n, depth)));
    Family::new(members, n).expect("members respect the budget")
}

/// `K` independent random members.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize, depth: u32) -> Family {
    let members = (0..k.max(1)).map(|_| random_step_function(rng, n, depth)).collect();
    Family::new(members, n).expect("members respect the budget")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(n: u128, e: u32) -> Dyadic {
        Dyadic::new(n, e).unwrap()
    }

    fn above(b: Dyadic) -> StepFunction {
        StepFunction::new(vec![b], vec![true, false]).unwrap()
    }

    #[test]
    fn profile_of_disjoint_breakpoints() {
        let fam = Family::new(vec![above(d(1, 1)), above(d(1, 2))], 1).unwrap();
        let p = vote_profile(&fam);
        assert_eq!(p.merged_breakpoints, vec![d(1, 1), d(1, 2)]);
        assert_eq!(p.ones_count, vec![2, 1, 0]);
    }

    #[test]
    fn ensemble_examples() {
        let f = above(d(1, 1));
        assert_eq!(ensemble(&Family::new(vec![f.clone()], 1).unwrap()), f);
        let fam = Family::new(vec![f.clone(), f.clone(), f.clone(), above(d(1, 2))], 1).unwrap();
        assert_eq!(ensemble(&fam), f);
        // 2 of 4 on (1/4, 1/2] is a tie and counts as 1
        let tie = Family::new(vec![f.clone(), f, above(d(1, 2)), above(d(1, 2))], 1).unwrap();
        assert_eq!(ensemble(&tie), above(d(1, 2)));
    }

    #[test]
    fn consistency_examples() {
        let f = above(d(1, 1));
        assert_eq!(consistency(&Family::new(vec![f.clone(); 4], 1).unwrap()), Rational::from_integer(1));
        let fam = Family::new(vec![f.clone(), f.clone(), f, above(d(1, 2))], 1).unwrap();
        assert_eq!(consistency(&fam), Rational::new(3, 4));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(discontinuity_bound(4, 2).unwrap(), Rational::from_integer(3));
        assert_eq!(discontinuity_bound(8, 3).unwrap(), Rational::from_integer(5));
        assert_eq!(discontinuity_bound(7, 2).unwrap(), Rational::from_integer(6));
        assert_eq!(discontinuity_bound(3, 2).unwrap_err(), TheoryError::KTooSmall(3));
    }

    #[test]
    fn unanimous_family_jumps_by_k() {
        let g = StepFunction::alternating(vec![d(1, 1), d(1, 3)], true).unwrap();
        let check = check_proof_quantities(&Family::new(vec![g; 4], 2).unwrap()).unwrap();
        assert_eq!(check.jumps.iter().map(|j| j.1).collect::<Vec<_>>(), vec![4, 4]);
        assert_eq!(check.jump_check, Check::Pass);
        assert!(check.holds());
    }

    #[test]
    fn split_family_is_not_applicable() {
        let fam = Family::new(vec![above(d(1, 1)), above(d(1, 1)), above(d(1, 2)), above(d(1, 2))], 1).unwrap();
        let check = check_proof_quantities(&fam).unwrap();
        assert_eq!(check.jump_check, Check::NotApplicable);
        assert_eq!(check.count_check, Check::NotApplicable);
        assert_eq!(check.sum_check, Check::Pass);
    }

    #[test]
    fn budget_is_enforced() {
        let g = StepFunction::alternating(vec![d(1, 1), d(1, 2)], true).unwrap();
        assert_eq!(
            Family::new(vec![g], 1).unwrap_err(),
            TheoryError::SizeBudget { member: 0, discontinuities: 2, budget: 1 }
        );
        assert_eq!(Family::new(vec![], 1).unwrap_err(), TheoryError::EmptyFamily);
    }

    #[test]
    fn generated_families_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 4..=9 {
            let fam = random_consistent_family(&mut rng, k, 3, 6);
            assert!(consistency(&fam) > Rational::new(3, 4));
        }
    }
}
