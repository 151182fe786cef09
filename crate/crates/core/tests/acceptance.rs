//! Acceptance gate: one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use lorgeo::algebra::{is_unimodular, jacobi_residual, CausalCharacter, FrameVector};
use lorgeo::families::{
    build_family, invariant_d_exact, is_symmetric_by_params, symmetric_locus, AlgebraInstance, FamilyParams,
    FamilyTag,
};
use lorgeo::geodesics::{
    count_summary, distance_to_families, enumerate_families, has_null_homogeneous, is_geodesic_vector, is_go,
    nabla_geodesic_k, numeric_has_null, numeric_rank, numeric_search, CountBranch,
};
use lorgeo::isotropy::{compute_l_instance, isotropy_report};
use lorgeo::sampling::{random_instance, random_nonsymmetric, random_nonzero, sample_branch, FiltrationLocus};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Rational = lorgeo::exact::Rational;

const NON_UNIMODULAR: [FamilyTag; 3] = [FamilyTag::G5, FamilyTag::G6, FamilyTag::G7];

type Filter = fn(&AlgebraInstance) -> bool;
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + criterion)
}

fn sample_where(tag: FamilyTag, rng: &mut ChaCha8Rng, keep: impl Fn(&AlgebraInstance) -> bool) -> AlgebraInstance {
    loop {
        let inst = random_nonsymmetric(tag, rng, 0.3);
        if keep(&inst) {
            return inst;
        }
    }
}

fn zero(inst: &AlgebraInstance, i: usize) -> bool {
    let p = inst.params.rationals();
    [p.alpha, p.beta, p.gamma, p.delta][i].is_zero()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let groups: [(&str, FamilyTag, Filter); 4] = [
        ("g5", FamilyTag::G5, |_| true),
        ("g6", FamilyTag::G6, |_| true),
        ("g7 alpha=0!=gamma", FamilyTag::G7, |i| zero(i, 0) && !zero(i, 2)),
        ("g7 alpha!=0=gamma", FamilyTag::G7, |i| !zero(i, 0) && zero(i, 2)),
    ];
    let (mut bad_members, mut members, mut far, mut worst) = (0usize, 0usize, 0usize, 0.0f64);
    let mut examples = Vec::new();
    for (name, tag, keep) in groups {
        for n in 0..100u64 {
            let inst = sample_where(tag, &mut rng, keep);
            let fams = enumerate_families(&inst).expect("non-symmetric");
            for f in &fams {
                for _ in 0..1000 {
                    if let Some(x) = f.sample_member(&mut rng) {
                        members += 1;
                        if is_geodesic_vector(&inst.constants, &[], &x, 1e-9).is_none() {
                            bad_members += 1;
                        }
                    }
                }
            }
            let found = numeric_search(&inst.constants, &[], 10_000, 1e-9, n);
            for g in &found {
                let d = distance_to_families(&fams, &g.xm);
                worst = worst.max(d);
                if d > 1e-6 {
                    far += 1;
                    if examples.len() < 3 {
                        examples.push(format!("{name} {:?}", inst.params.values()));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad_members == 0 && far == 0 && elapsed <= Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "{members} family members, {bad_members} above 1e-9; {far} found directions farther than 1e-6 \
             (worst {worst:.2e}){}; runtime {:.1}s",
            if examples.is_empty() { String::new() } else { format!(", e.g. {}", examples.join("; ")) },
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    let mut lines = Vec::new();
    let mut pass = true;
    for branch in CountBranch::ALL {
        let mut stated_bad = 0;
        let mut numeric_bad = 0;
        let mut drawn = 0;
        for n in 0..50u64 {
            let Some(inst) = sample_branch(branch, &mut rng) else { break };
            drawn += 1;
            let s = count_summary(&inst).expect("non-symmetric");
            let found = numeric_search(&inst.constants, &[], 2000, 1e-9, n);
            stated_bad += usize::from(s.independent_count != s.stated_count);
            numeric_bad += usize::from(numeric_rank(&found) != s.stated_count);
        }
        if drawn < 50 {
            pass = false;
            lines.push(format!("{branch}: no valid tuple satisfies the branch conditions"));
        } else if stated_bad + numeric_bad > 0 {
            pass = false;
            lines.push(format!(
                "{branch}: stated {} mismatches derivation in {stated_bad}/50, numeric rank in {numeric_bad}/50",
                branch.stated_count()
            ));
        }
    }
    outcome(pass, if lines.is_empty() { "all branches match".into() } else { lines.join("; ") })
}

fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    let (mut disagree, mut g7_false, mut non_null) = (0, 0, 0);
    for tag in NON_UNIMODULAR {
        for n in 0..500u64 {
            let inst = random_nonsymmetric(tag, &mut rng, 0.3);
            let claimed = has_null_homogeneous(&inst).expect("non-symmetric");
            let found = numeric_search(&inst.constants, &[], 2000, 1e-9, n);
            disagree += usize::from(claimed != numeric_has_null(&found));
            if tag == FamilyTag::G7 {
                g7_false += usize::from(!claimed);
                if !zero(&inst, 0) && zero(&inst, 2) && !zero(&inst, 1) {
                    non_null += found.iter().filter(|g| g.causal != CausalCharacter::Null).count();
                }
            }
        }
    }
    outcome(
        disagree == 0 && g7_false == 0 && non_null == 0,
        format!("{disagree} disagreements, {g7_false} g7 instances without null, {non_null} non-null directions on g7 alpha!=0=gamma, beta!=0"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let mut lines = Vec::new();
    for locus in FiltrationLocus::ALL {
        let mut bad = 0;
        let mut seen = std::collections::BTreeMap::new();
        for _ in 0..200 {
            let inst = locus.sample(&mut rng);
            let rep = isotropy_report(&inst);
            if rep.first_k != Some(locus.stated_k()) {
                bad += 1;
                *seen.entry(format!("{:?}", rep.first_k)).or_insert(0) += 1;
            }
        }
        if bad > 0 {
            lines.push(format!("{locus:?}: minimal k {seen:?} instead of {} in {bad}/200", locus.stated_k()));
        }
    }
    // dim l: 1 on the symmetric g5 locus (γ,δ) = (-β,α), 0 on all non-symmetric instances
    let mut dim_bad = 0;
    for _ in 0..200 {
        let (a, b) = (random_nonzero(&mut rng), random_nonzero(&mut rng));
        let p = FamilyParams::exact(a.clone(), b.clone(), -b, a);
        let inst = build_family(FamilyTag::G5, p).expect("valid");
        dim_bad += usize::from(compute_l_instance(&inst).dim() != 1);
    }
    for tag in NON_UNIMODULAR {
        for _ in 0..200 {
            let inst = random_nonsymmetric(tag, &mut rng, 0.4);
            dim_bad += usize::from(compute_l_instance(&inst).dim() != 0);
        }
    }
    if dim_bad > 0 {
        lines.push(format!("{dim_bad} dim l mismatches"));
    }
    outcome(lines.is_empty(), if lines.is_empty() { "all loci match".into() } else { lines.join("; ") })
}

fn random_direction(rng: &mut ChaCha8Rng) -> FrameVector {
    FrameVector(std::array::from_fn(|_| rng.sample(StandardNormal)))
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let (mut disagree, mut positives) = (0, 0);
    for i in 0..1000 {
        let tag = FamilyTag::ALL[i % FamilyTag::ALL.len()];
        let inst = random_nonsymmetric(tag, &mut rng, 0.3);
        let fams = if tag.is_unimodular_family() { Vec::new() } else { enumerate_families(&inst).unwrap_or_default() };
        let x = match rng.gen_range(0..3) {
            0 => fams
                .get(rng.gen_range(0..fams.len().max(1)))
                .and_then(|f| f.sample_member(&mut rng))
                .unwrap_or_else(|| random_direction(&mut rng)),
            1 => FrameVector::basis(rng.gen_range(0..3)),
            _ => random_direction(&mut rng),
        };
        let a = is_geodesic_vector(&inst.constants, &[], &x, 1e-8).is_some();
        let b = nabla_geodesic_k(&inst.constants, &x, 1e-8).is_some();
        positives += usize::from(a);
        disagree += usize::from(a != b);
    }
    outcome(disagree == 0, format!("{disagree} disagreements over 1000 pairs ({positives} geodesic)"))
}

fn go_loci(rng: &mut ChaCha8Rng) -> Vec<AlgebraInstance> {
    let (a, b) = loop {
        let (a, b) = (random_nonzero(rng), random_nonzero(rng));
        if a != b {
            break (a, b);
        }
    };
    let z = Rational::zero();
    let mut out: Vec<AlgebraInstance> = [[&a, &a, &b], [&a, &b, &a], [&b, &a, &a]]
        .iter()
        .map(|p| build_family(FamilyTag::G3, FamilyParams::exact(p[0].clone(), p[1].clone(), p[2].clone(), z.clone())))
        .collect::<Result<_, _>>()
        .expect("valid g3");
    let eps: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
    let alpha = &b - Rational::from_integer(eps.into());
    out.push(build_family(FamilyTag::G4, FamilyParams::exact(alpha, b, z.clone(), z).with_epsilon(eps)).expect("valid g4"));
    out
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let (mut locus_bad, mut locus_n, mut no_failure, mut mismatch) = (0, 0, 0, 0);
    for i in 0..25 {
        for inst in go_loci(&mut rng) {
            if is_symmetric_by_params(&inst) {
                continue;
            }
            locus_n += 1;
            let r = is_go(&inst, 500, 1e-9, i).expect("go check");
            locus_bad += usize::from(!(r.is_go && r.go_by_sampling));
            mismatch += usize::from(r.is_go != r.is_naturally_reductive);
        }
    }
    for tag in NON_UNIMODULAR {
        for i in 0..100 {
            let inst = random_nonsymmetric(tag, &mut rng, 0.3);
            let r = is_go(&inst, 500, 1e-9, i).expect("go check");
            no_failure += usize::from(r.failures.is_empty());
            mismatch += usize::from(r.is_go != r.is_naturally_reductive);
        }
    }
    outcome(
        locus_bad + no_failure + mismatch == 0,
        format!(
            "{locus_bad}/{locus_n} g3/g4 locus instances not g.o.; {no_failure}/300 g5-g7 without failure direction; \
             {mismatch} g.o./naturally reductive mismatches"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let (mut disagree, mut margin, mut symmetric) = (0, 0, 0);
    // the symmetric loci are characterised for the non-unimodular families
    for tag in NON_UNIMODULAR {
        for _ in 0..1000 {
            let inst = random_instance(tag, &mut rng, 0.5);
            let exact = symmetric_locus(tag, &inst.params).expect("exact parameters");
            let m = inst.max_nabla_riemann();
            if !exact && m <= inst.symmetry_tol(1e-6) && m > inst.symmetry_tol(1e-8) {
                margin += 1;
                continue;
            }
            symmetric += usize::from(exact);
            disagree += usize::from(exact != (m <= inst.symmetry_tol(1e-8)));
        }
    }
    let one = Rational::from_integer(1.into());
    let g5 = build_family(FamilyTag::G5, FamilyParams::exact(one.clone(), Rational::zero(), Rational::zero(), one))
        .expect("valid");
    let m = g5.max_nabla_riemann();
    outcome(
        disagree == 0 && m <= 1e-10,
        format!("{disagree} disagreements over 3000 tuples ({symmetric} symmetric, {margin} in margin); g5(1,0,0,1) max|nabla R| = {m:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let (mut jac_bad, mut uni_bad, mut d_bad, mut worst) = (0, 0, 0, 0.0f64);
    for tag in FamilyTag::ALL {
        for _ in 0..100 {
            let inst = random_instance(tag, &mut rng, 0.3);
            let r = jacobi_residual(&inst.constants);
            worst = worst.max(r);
            jac_bad += usize::from(r > 1e-12);
            uni_bad += usize::from(is_unimodular(&inst.constants, 1e-12) != tag.is_unimodular_family());
            if tag.is_unimodular_family() {
                continue;
            }
            let d = invariant_d_exact(&inst.params.rationals()).expect("alpha + delta != 0");
            for _ in 0..20 {
                let t = random_nonzero(&mut rng);
                let t = if rng.gen_bool(0.5) { t.abs() } else { t };
                d_bad += usize::from(invariant_d_exact(&inst.params.scaled(&t).rationals()).ok() != Some(d.clone()));
            }
        }
    }
    outcome(
        jac_bad + uni_bad + d_bad == 0,
        format!("jacobi worst {worst:.1e} ({jac_bad} above 1e-12), {uni_bad} unimodularity errors, {d_bad} D changes under scaling"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("table reproduction", criterion_1),
        ("independent geodesic counts", criterion_2),
        ("null homogeneous geodesics", criterion_3),
        ("isotropy filtration", criterion_4),
        ("oracle equivalence", criterion_5),
        ("g.o. and natural reductivity", criterion_6),
        ("symmetry agreement", criterion_7),
        ("structural gates", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
