//! Random valid parameter tuples with exact rational entries, per family
//! and per case branch.

use num_traits::{One, Zero};
use rand::Rng;

use crate::exact::Rational;
use crate::families::{build_family, is_symmetric_by_params, AlgebraInstance, FamilyParams, FamilyTag};
use crate::geodesics::{count_branch, CountBranch};
use crate::isotropy::predicted_k;

const MAX_TRIES: usize = 10_000;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// A random rational `p/q` with `|p| <= 24`, `1 <= q <= 6`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    q(rng.gen_range(-24..=24), rng.gen_range(1..=6))
}

pub fn random_nonzero<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = random_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

/// With probability `special_prob` a value from a small pool (mostly zero,
/// otherwise ±1 or 2) so that equality loci are hit regularly.
fn maybe_zero<R: Rng>(rng: &mut R, special_prob: f64) -> Rational {
    const POOL: [i64; 6] = [0, 0, 0, 1, -1, 2];
    if rng.gen_bool(special_prob) {
        q(POOL[rng.gen_range(0..POOL.len())], 1)
    } else {
        random_nonzero(rng)
    }
}

fn params(v: [Rational; 4]) -> FamilyParams {
    let [a, b, g, d] = v;
    FamilyParams::exact(a, b, g, d)
}

/// A random tuple satisfying the family's constraints (possibly symmetric).
/// `zero_prob` biases individual free parameters towards zero and small
/// integers so that the special sub-loci get exercised.
pub fn random_instance<R: Rng>(tag: FamilyTag, rng: &mut R, zero_prob: f64) -> AlgebraInstance {
    for _ in 0..MAX_TRIES {
        let p = match tag {
            FamilyTag::G1 => params([random_nonzero(rng), maybe_zero(rng, zero_prob), Rational::zero(), Rational::zero()]),
            FamilyTag::G2 => params([maybe_zero(rng, zero_prob), maybe_zero(rng, zero_prob), random_nonzero(rng), Rational::zero()]),
            FamilyTag::G3 => {
                params([maybe_zero(rng, zero_prob), maybe_zero(rng, zero_prob), maybe_zero(rng, zero_prob), Rational::zero()])
            }
            FamilyTag::G4 => params([maybe_zero(rng, zero_prob), maybe_zero(rng, zero_prob), Rational::zero(), Rational::zero()])
                .with_epsilon(if rng.gen_bool(0.5) { 1 } else { -1 }),
            FamilyTag::G5 | FamilyTag::G6 => {
                let (a, b) = (maybe_zero(rng, zero_prob), maybe_zero(rng, zero_prob));
                let (g, d) = if a.is_zero() && b.is_zero() {
                    (maybe_zero(rng, zero_prob), random_nonzero(rng))
                } else {
                    // αγ + βδ = 0 (g5) / αγ - βδ = 0 (g6)
                    let t = maybe_zero(rng, zero_prob);
                    if tag == FamilyTag::G5 {
                        (-&t * &b, &t * &a)
                    } else {
                        (&t * &b, &t * &a)
                    }
                };
                params([a, b, g, d])
            }
            FamilyTag::G7 => {
                let (b, d) = (maybe_zero(rng, zero_prob), maybe_zero(rng, zero_prob));
                if rng.gen_bool(0.5) {
                    params([Rational::zero(), b, maybe_zero(rng, zero_prob), d])
                } else {
                    params([maybe_zero(rng, zero_prob), b, Rational::zero(), d])
                }
            }
        };
        if let Ok(inst) = build_family(tag, p) {
            return inst;
        }
    }
    unreachable!("constraint rejection sampling did not terminate")
}

pub fn random_nonsymmetric<R: Rng>(tag: FamilyTag, rng: &mut R, zero_prob: f64) -> AlgebraInstance {
    loop {
        let inst = random_instance(tag, rng, zero_prob);
        if !is_symmetric_by_params(&inst) {
            return inst;
        }
    }
}

/// A random instance in the given counting branch, or `None` when the
/// branch is empty (no valid tuple satisfies its conditions).
pub fn sample_branch<R: Rng>(branch: CountBranch, rng: &mut R) -> Option<AlgebraInstance> {
    match branch {
        CountBranch::G5CaseI => Some(g5_case_i(rng)),
        // αγ = βδ together with both discriminants negative forces (1-m)² < 0
        CountBranch::G6CaseI | CountBranch::G6CaseII => None,
        CountBranch::G7ABetaZero
        | CountBranch::G7ADAtMostOne
        | CountBranch::G7ADAboveOne
        | CountBranch::G7BBetaZero
        | CountBranch::G7BBetaNonzero => Some(g7_branch(branch, rng)),
        _ => {
            let tag = if matches!(branch, CountBranch::G5Generic | CountBranch::G5CaseII) {
                FamilyTag::G5
            } else {
                FamilyTag::G6
            };
            (0..MAX_TRIES).find_map(|_| {
                let inst = random_nonsymmetric(tag, rng, 0.15);
                (count_branch(&inst).ok() == Some(branch)).then_some(inst)
            })
        }
    }
}

/// `α = 1, δ = s², β = 2s/(1-s²), γ = -βδ` with `|1-s²| < 2|s|`, scaled:
/// the second discriminant vanishes and the first is negative.
fn g5_case_i<R: Rng>(rng: &mut R) -> AlgebraInstance {
    loop {
        let s = q(rng.gen_range(5..=24), rng.gen_range(2..=10));
        let one = Rational::one();
        let s2 = &s * &s;
        let gap = &one - &s2;
        if gap.is_zero() || gap.clone() * gap.clone() >= q(4, 1) * &s2 {
            continue;
        }
        let beta = q(2, 1) * &s / &gap;
        let delta = s2;
        let gamma = -&beta * &delta;
        let t = random_nonzero(rng);
        let p = params([t.clone(), &beta * &t, &gamma * &t, &delta * &t]);
        if let Ok(inst) = build_family(FamilyTag::G5, p) {
            if !is_symmetric_by_params(&inst) {
                return inst;
            }
        }
    }
}

fn g7_branch<R: Rng>(branch: CountBranch, rng: &mut R) -> AlgebraInstance {
    loop {
        let (b, g, d, a) = match branch {
            CountBranch::G7ABetaZero => (Rational::zero(), random_nonzero(rng), random_nonzero(rng), Rational::zero()),
            CountBranch::G7ADAtMostOne | CountBranch::G7ADAboveOne => {
                (random_nonzero(rng), random_nonzero(rng), random_nonzero(rng), Rational::zero())
            }
            CountBranch::G7BBetaZero => (Rational::zero(), Rational::zero(), random_rational(rng), random_nonzero(rng)),
            _ => (random_nonzero(rng), Rational::zero(), random_rational(rng), random_nonzero(rng)),
        };
        let Ok(inst) = build_family(FamilyTag::G7, params([a, b, g, d])) else { continue };
        if is_symmetric_by_params(&inst) {
            continue;
        }
        if count_branch(&inst).ok() == Some(branch) {
            return inst;
        }
    }
}

/// Loci of the isotropy filtration table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrationLocus {
    /// `βδ ≠ 0` (k = 1).
    G5BetaDelta,
    /// `α = β = 0`, `γ ≠ 0 ≠ δ` (k = 2).
    G5AlphaBetaZero,
    /// `γ = δ = 0`, `α ≠ 0 ≠ β` (k = 2).
    G5GammaDeltaZero,
    G5Default,
    /// `β(β² - α²) ≠ 0` (k = 2).
    G6Generic,
    G6Default,
    /// `γ = 0`, `αδ(α² - δ²) ≠ 0` (k = 1).
    G7GammaZero,
    /// `α = β = 0 ≠ γ` (k = 2).
    G7AlphaBetaZero,
    G7Default,
}

impl FiltrationLocus {
    pub const ALL: [FiltrationLocus; 9] = [
        FiltrationLocus::G5BetaDelta,
        FiltrationLocus::G5AlphaBetaZero,
        FiltrationLocus::G5GammaDeltaZero,
        FiltrationLocus::G5Default,
        FiltrationLocus::G6Generic,
        FiltrationLocus::G6Default,
        FiltrationLocus::G7GammaZero,
        FiltrationLocus::G7AlphaBetaZero,
        FiltrationLocus::G7Default,
    ];

    pub fn tag(self) -> FamilyTag {
        match self {
            FiltrationLocus::G5BetaDelta
            | FiltrationLocus::G5AlphaBetaZero
            | FiltrationLocus::G5GammaDeltaZero
            | FiltrationLocus::G5Default => FamilyTag::G5,
            FiltrationLocus::G6Generic | FiltrationLocus::G6Default => FamilyTag::G6,
            _ => FamilyTag::G7,
        }
    }

    pub fn stated_k(self) -> usize {
        match self {
            FiltrationLocus::G5BetaDelta | FiltrationLocus::G7GammaZero => 1,
            FiltrationLocus::G5AlphaBetaZero
            | FiltrationLocus::G5GammaDeltaZero
            | FiltrationLocus::G6Generic
            | FiltrationLocus::G7AlphaBetaZero => 2,
            _ => 0,
        }
    }

    fn contains(self, inst: &AlgebraInstance) -> bool {
        let p = inst.params.rationals();
        let (a, b, g, d) = (p.alpha.is_zero(), p.beta.is_zero(), p.gamma.is_zero(), p.delta.is_zero());
        match self {
            FiltrationLocus::G5BetaDelta => !b && !d,
            FiltrationLocus::G5AlphaBetaZero => a && b && !g && !d,
            FiltrationLocus::G5GammaDeltaZero => g && d && !a && !b,
            FiltrationLocus::G7GammaZero => g && predicted_k(inst) == Some(1),
            FiltrationLocus::G7AlphaBetaZero => a && b && !g,
            FiltrationLocus::G6Generic => predicted_k(inst) == Some(2),
            _ => predicted_k(inst) == Some(0),
        }
    }

    pub fn sample<R: Rng>(self, rng: &mut R) -> AlgebraInstance {
        loop {
            let inst = random_nonsymmetric(self.tag(), rng, 0.4);
            if self.contains(&inst) {
                return inst;
            }
        }
    }
}
