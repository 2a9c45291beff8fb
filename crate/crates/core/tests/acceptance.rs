//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured statistics. Run with `--nocapture` to see them.
//!
//! The step-count bounds are termination guarantees, not reachable targets:
//! searching to those depths would take n!^m nodes. The suite therefore
//! checks the bound formulas exactly and validates the engine on
//! property-based corpora cross-checked against the grid oracle.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use wds_core::bounds;
use wds_core::form::{ExponentVec, Form, SignCategory, SimplexPoint};
use wds_core::oracle;
use wds_core::rng::SplitMix64;
use wds_core::search::{
    classify, verify_certificate, verify_witness, NodeStatus, SearchConfig, Verdict, VerdictKind,
};
use wds_core::util::{ratio_from_string, ratio_pow, Compositions};
use wds_core::wds::{
    substitute, wds_children, ComposedSubstitution, Permutation,
};

fn rat(s: &str) -> BigRational {
    ratio_from_string(s).unwrap()
}

/// Random nonzero form: each degree-d monomial present with probability
/// about 1/2, coefficients uniform in [-max_coef, max_coef] without 0.
fn random_form(rng: &mut SplitMix64, n: usize, d: u32, max_coef: i64) -> Form {
    loop {
        let mut terms: Vec<(ExponentVec, BigInt)> = Vec::new();
        for exps in Compositions::new(d as u64, n) {
            if rng.below(2) == 0 {
                continue;
            }
            let mag = 1 + rng.below(max_coef as u64) as i64;
            let coef = if rng.below(2) == 0 { mag } else { -mag };
            terms.push((
                ExponentVec::new(exps.iter().map(|&e| e as u32).collect()),
                BigInt::from(coef),
            ));
        }
        if let Ok(f) = Form::from_terms(n, terms) {
            return f;
        }
    }
}

/// Random form with all monomials present and strictly positive coefficients.
fn random_positive_complete(rng: &mut SplitMix64, n: usize, d: u32, max_coef: u64) -> Form {
    let terms: Vec<(ExponentVec, BigInt)> = Compositions::new(d as u64, n)
        .map(|exps| {
            (
                ExponentVec::new(exps.iter().map(|&e| e as u32).collect()),
                BigInt::from(1 + rng.below(max_coef) as i64),
            )
        })
        .collect();
    Form::from_terms(n, terms).expect("complete positive form")
}

fn random_path(rng: &mut SplitMix64, n: usize, depth: usize) -> ComposedSubstitution {
    let perms = Permutation::all(n);
    let mut c = ComposedSubstitution::identity(n);
    for _ in 0..depth {
        c = c.compose(&perms[rng.below(perms.len() as u64) as usize]);
    }
    c
}

fn random_rational(rng: &mut SplitMix64, max_num: u64, max_den: u64) -> BigRational {
    BigRational::new(
        BigInt::from(rng.below(max_num + 1)),
        BigInt::from(1 + rng.below(max_den)),
    )
}

/// Random point inside the cell of a composed substitution: the image of a
/// random rational simplex point under the cell matrix.
fn random_cell_point(rng: &mut SplitMix64, c: &ComposedSubstitution) -> Vec<BigRational> {
    let n = c.n();
    let weights: Vec<BigRational> = (0..n).map(|_| random_rational(rng, 20, 1)).collect();
    let total: BigRational = weights.iter().sum();
    let weights: Vec<BigRational> = if total.is_zero() {
        let mut w = vec![BigRational::zero(); n];
        w[0] = BigRational::one();
        w
    } else {
        weights.iter().map(|w| w / &total).collect()
    };
    (0..n)
        .map(|i| (0..n).map(|j| c.matrix().get(i, j) * &weights[j]).sum())
        .collect()
}

fn contraction_bound(n: usize, depth: u32) -> BigRational {
    ratio_pow(
        &BigRational::new(BigInt::from(n as u64 - 1), BigInt::from(n as u64)),
        depth,
    )
}

/// The deterministic corpus shared by criteria 6, 8, and 9.
fn soundness_corpus() -> Vec<Form> {
    let mut rng = SplitMix64::new(0xC0FFEE);
    (0..300)
        .map(|_| {
            let n = 2 + rng.below(2) as usize;
            let d = 1 + rng.below(4) as u32;
            random_form(&mut rng, n, d, 9)
        })
        .collect()
}

fn soundness_config() -> SearchConfig {
    SearchConfig { max_depth: 8, node_budget: 50_000, ..SearchConfig::default() }
}

#[test]
fn criterion_01_bound_formulas_exact() {
    let one = BigUint::one();
    assert_eq!(bounds::cp_steps(&one, 2, 2).unwrap(), 36);
    assert_eq!(bounds::cnps_steps(&one, 2, 2).unwrap(), 37);
    assert_eq!(
        bounds::c1_lower_bound(&one, 2, 2).unwrap(),
        BigRational::new(BigInt::one(), BigInt::from(1u64 << 22))
    );
    assert_eq!(
        bounds::jp_simplex_bound(&one, 2, 2).unwrap(),
        BigRational::new(BigInt::one(), BigInt::from(1u64 << 32))
    );

    // Adaptive-log route against the exact big-integer route.
    let mut rng = SplitMix64::new(101);
    let mut checked = 0;
    while checked < 50 {
        let m = BigUint::from(1 + rng.below(10));
        let n = 2 + rng.below(3) as u32;
        let d = 1 + rng.below(4) as u32;
        let xp = bounds::xp_factored(&m, n, d).unwrap();
        let adaptive = bounds::floor_log_ratio_factored(&xp, n, bounds::DEFAULT_DIGIT_BUDGET)
            .unwrap();
        let materialized =
            BigRational::from(BigInt::from(xp.to_biguint(bounds::DEFAULT_DIGIT_BUDGET).unwrap()));
        let exact = bounds::floor_log_ratio_exact(&materialized, n).unwrap();
        assert_eq!(adaptive, exact, "routes disagree at M={m}, n={n}, d={d}");
        assert_eq!(bounds::cp_steps(&m, n, d).unwrap(), exact + 2);
        checked += 1;
    }
    println!("criterion 01 (bound formulas exact, dual-route x50): PASS");
}

#[test]
fn criterion_02_closure_of_matrix_products() {
    let mut rng = SplitMix64::new(202);
    for trial in 0..1000 {
        let n = 2 + rng.below(4) as usize; // 2..=5
        let depth = 1 + rng.below(8) as usize;
        let c = random_path(&mut rng, n, depth);
        assert!(c.matrix().is_normal(), "trial {trial}: column sums drifted");
        assert!(c.matrix().entries_nonnegative(), "trial {trial}: negative entry");

        let y: Vec<BigRational> = (0..n).map(|_| random_rational(&mut rng, 30, 7)).collect();
        let image: Vec<BigRational> = (0..n)
            .map(|i| (0..n).map(|j| c.matrix().get(i, j) * &y[j]).sum())
            .collect();
        let li: BigRational = image.iter().sum();
        let ri: BigRational = y.iter().sum();
        assert_eq!(li, ri, "trial {trial}: coordinate sum not preserved");
    }
    println!("criterion 02 (column-stochastic closure, 1000 products): PASS");
}

#[test]
fn criterion_03_contraction() {
    let mut rng = SplitMix64::new(202); // same corpus as criterion 2
    for trial in 0..1000 {
        let n = 2 + rng.below(4) as usize;
        let depth = 1 + rng.below(8) as usize;
        let c = random_path(&mut rng, n, depth);
        let bound = contraction_bound(n, depth as u32);

        let (_, beta) = c.alpha_beta();
        for row in &beta {
            for b in row {
                assert!(b.abs() <= bound, "trial {trial}: |beta| over the contraction bound");
            }
        }

        // Pairwise squared distances of the cell vertices, compared in
        // exact rationals against the contraction bound.
        for i in 0..n {
            let ci = c.matrix().column(i);
            for j in i + 1..n {
                let cj = c.matrix().column(j);
                let dist2: BigRational = ci
                    .iter()
                    .zip(&cj)
                    .map(|(a, b)| {
                        let d = a - b;
                        &d * &d
                    })
                    .sum();
                assert!(
                    dist2 <= bound,
                    "trial {trial}: squared vertex distance over the contraction bound"
                );
            }
        }

        // Consume the same random draws as criterion 2 to stay aligned.
        let _: Vec<BigRational> = (0..n).map(|_| random_rational(&mut rng, 30, 7)).collect();
    }
    println!("criterion 03 (beta and cell-diameter contraction, 1000 products): PASS");
}

#[test]
fn criterion_04_substitution_identity() {
    let mut rng = SplitMix64::new(404);
    for trial in 0..200 {
        let n = 2 + rng.below(3) as usize; // 2..=4
        let d = 1 + rng.below(5) as u32;
        let f = random_form(&mut rng, n, d, 9);
        let depth = rng.below(4) as usize; // 0..=3
        let c = random_path(&mut rng, n, depth);
        let sub = substitute(&f, &c).unwrap();
        assert!(sub.scale.is_positive());
        for _ in 0..5 {
            let y: Vec<BigRational> = (0..n).map(|_| random_rational(&mut rng, 30, 7)).collect();
            let image: Vec<BigRational> = (0..n)
                .map(|i| (0..n).map(|j| c.matrix().get(i, j) * &y[j]).sum())
                .collect();
            assert_eq!(
                sub.form.evaluate(&y).unwrap(),
                &sub.scale * f.evaluate(&image).unwrap(),
                "trial {trial}: substitution identity broken"
            );
        }
    }
    println!("criterion 04 (substitution identity, 200 forms x 5 points): PASS");
}

#[test]
fn criterion_05_sign_complete_propagation() {
    let mut rng = SplitMix64::new(505);
    for trial in 0..500 {
        let n = 2 + rng.below(3) as usize; // 2..=4
        let d = 1 + rng.below(4) as u32;
        let f = random_positive_complete(&mut rng, n, d, 9);
        assert_eq!(f.sign_summary().category, SignCategory::AllPositiveComplete);
        for (theta, sub) in wds_children(&f) {
            assert_eq!(
                sub.form.sign_summary().category,
                SignCategory::AllPositiveComplete,
                "trial {trial}: child {theta} lost positive completeness"
            );
        }
        let neg = Form::from_terms(n, f.terms().map(|(e, c)| (e.clone(), -c))).unwrap();
        assert_eq!(neg.sign_summary().category, SignCategory::AllNegativeComplete);
        for (theta, sub) in wds_children(&neg) {
            assert_eq!(
                sub.form.sign_summary().category,
                SignCategory::AllNegativeComplete,
                "trial {trial}: child {theta} lost negative completeness"
            );
        }
    }
    println!("criterion 05 (sign-complete propagation, 500 + 500 forms): PASS");
}

#[test]
fn criterion_06_decision_soundness_vs_oracle() {
    let corpus = soundness_corpus();
    let cfg = soundness_config();
    let mut tally = [0usize; 4];
    for (i, f) in corpus.iter().enumerate() {
        let verdict = classify(f, &cfg);
        let (min60, _) = oracle::grid_min(f, 60).unwrap();
        match &verdict {
            Verdict::PositiveDefinite { .. } => {
                tally[0] += 1;
                assert!(min60.is_positive(), "form {i} ({f}): PD but grid min {min60} <= 0");
            }
            Verdict::PositiveSemidefinite { .. } => {
                tally[1] += 1;
                assert!(
                    !min60.is_negative(),
                    "form {i} ({f}): PSD but grid min {min60} < 0"
                );
            }
            Verdict::NotPsd { witness, .. } => {
                tally[2] += 1;
                assert!(verify_witness(f, witness), "form {i} ({f}): witness fails");
                let hit = oracle::first_negative_grid(f, 60).unwrap();
                assert!(hit.is_some(), "form {i} ({f}): no negative grid point up to N=60");
            }
            Verdict::Undetermined { .. } => {
                tally[3] += 1;
            }
        }
    }
    println!(
        "criterion 06 (oracle agreement on 300 forms: PD={} PSD={} NotPSD={} Undet={}): PASS",
        tally[0], tally[1], tally[2], tally[3]
    );
}

#[test]
fn criterion_07_named_instances() {
    // Expanded (x1+x2+x3)^3: decided at the root.
    let cube = Form::parse(
        "x1^3+3*x1^2*x2+3*x1^2*x3+3*x1*x2^2+6*x1*x2*x3+3*x1*x3^2+x2^3+3*x2^2*x3+3*x2*x3^2+x3^3",
    )
    .unwrap();
    let v = classify(&cube, &SearchConfig::default());
    assert_eq!(v.kind(), VerdictKind::PositiveDefinite);
    assert_eq!(v.certificate().nodes.len(), 1, "not decided at depth 0");

    // Refutation with the exact midpoint witness.
    let disc = Form::parse("x1^2-3*x1*x2+x2^2").unwrap();
    match classify(&disc, &SearchConfig::default()) {
        Verdict::NotPsd { witness, .. } => {
            assert_eq!(
                witness.point,
                SimplexPoint::new(vec![rat("1/2"), rat("1/2")]).unwrap()
            );
            assert_eq!(witness.value, rat("-1/4"));
        }
        other => panic!("expected refutation, got {other:?}"),
    }

    // Perfect square: semidefinite with its exact zero.
    let square = Form::parse("x1^2-2*x1*x2+x2^2").unwrap();
    match classify(&square, &SearchConfig::default()) {
        Verdict::PositiveSemidefinite { zeros, definitely_not_pd, .. } => {
            assert!(definitely_not_pd);
            assert_eq!(zeros.len(), 1);
            assert_eq!(
                zeros[0].point,
                SimplexPoint::new(vec![rat("1/2"), rat("1/2")]).unwrap()
            );
        }
        other => panic!("expected semidefinite, got {other:?}"),
    }

    // The sextic with a zero at the barycenter: nonnegative cover found at
    // depth 2 (regression baseline), within the allowed depth 6.
    let motzkin = Form::parse("x1^4*x2^2+x1^2*x2^4+x3^6-3*x1^2*x2^2*x3^2").unwrap();
    let cfg = SearchConfig { max_depth: 6, ..SearchConfig::default() };
    match classify(&motzkin, &cfg) {
        Verdict::PositiveSemidefinite { certificate, zeros, definitely_not_pd } => {
            assert!(definitely_not_pd);
            let deepest = certificate.nodes.iter().map(|n| n.path.len()).max().unwrap();
            assert!(deepest <= 6);
            assert_eq!(deepest, 2, "cover depth baseline moved");
            let barycenter =
                SimplexPoint::new(vec![rat("1/3"), rat("1/3"), rat("1/3")]).unwrap();
            assert!(zeros.iter().any(|z| z.point == barycenter));
            assert!(zeros.iter().all(|z| motzkin.evaluate_point(&z.point).is_zero()));
        }
        other => panic!("expected semidefinite, got {other:?}"),
    }
    println!("criterion 07 (named instances incl. sextic cover at depth 2): PASS");
}

#[test]
fn criterion_08_certificate_integrity() {
    // Every certificate from the criterion-6 corpus and the named instances
    // replays; mutated certificates all fail.
    let corpus = soundness_corpus();
    let cfg = soundness_config();
    let mut sample_pd = None;
    let mut sample_psd = None;
    let mut sample_refuted = None;
    for f in &corpus {
        let verdict = classify(f, &cfg);
        verify_certificate(f, verdict.certificate())
            .unwrap_or_else(|e| panic!("certificate for {f} fails: {e}"));
        match verdict.kind() {
            VerdictKind::PositiveDefinite if sample_pd.is_none() => {
                sample_pd = Some((f.clone(), verdict.certificate().clone()));
            }
            VerdictKind::PositiveSemidefinite if sample_psd.is_none() => {
                sample_psd = Some((f.clone(), verdict.certificate().clone()));
            }
            VerdictKind::NotPsd if sample_refuted.is_none() => {
                sample_refuted = Some((f.clone(), verdict.certificate().clone()));
            }
            _ => {}
        }
    }
    let named = [
        Form::parse("x1^2-3*x1*x2+x2^2").unwrap(),
        Form::parse("x1^2-2*x1*x2+x2^2").unwrap(),
        Form::parse("x1^4*x2^2+x1^2*x2^4+x3^6-3*x1^2*x2^2*x3^2").unwrap(),
    ];
    for f in &named {
        let verdict = classify(f, &SearchConfig { max_depth: 6, ..SearchConfig::default() });
        verify_certificate(f, verdict.certificate()).unwrap();
    }

    // 20 mutations across the three sample certificates, each a genuine
    // tamper for its sample kind: flipped statuses, deleted nodes, altered
    // paths, corrupted scales, forged digests, and claim changes.
    let psd = sample_psd.expect("corpus contains a PSD form");
    let refuted = sample_refuted.expect("corpus contains a refuted form");
    let pd = sample_pd.unwrap_or_else(|| {
        let f = Form::parse("x1^2-x1*x2+x2^2").unwrap();
        let v = classify(&f, &cfg);
        (f, v.certificate().clone())
    });

    let flip_status = |c: &mut wds_core::search::Certificate| {
        let node = c.nodes.last_mut().expect("nonempty");
        node.status = match node.status {
            NodeStatus::Nonneg | NodeStatus::NegativeAxis(_) | NodeStatus::Frontier => {
                NodeStatus::PosComplete
            }
            _ => NodeStatus::Nonneg,
        };
    };
    let delete_node = |c: &mut wds_core::search::Certificate| {
        c.nodes.pop();
    };
    let rewrite_path = |c: &mut wds_core::search::Certificate| {
        let n = c.nodes.last().map(|r| r.path.first().map_or(2, |p| p.n())).unwrap_or(2);
        let theta = Permutation::all(n).pop().unwrap();
        c.nodes.last_mut().expect("nonempty").path = vec![theta; 3];
    };
    let corrupt_scale = |c: &mut wds_core::search::Certificate| {
        c.nodes.last_mut().expect("nonempty").scale = rat("123/7");
    };
    let forge_digest = |c: &mut wds_core::search::Certificate| {
        c.digest = format!("{:0>64}", "f00d");
    };
    let escalate_claim = |c: &mut wds_core::search::Certificate| {
        c.claimed = VerdictKind::PositiveDefinite;
    };
    let downgrade_claim = |c: &mut wds_core::search::Certificate| {
        c.claimed = VerdictKind::PositiveSemidefinite;
    };
    let drop_zeros_claim_pd = |c: &mut wds_core::search::Certificate| {
        c.zeros.clear();
        c.claimed = VerdictKind::PositiveDefinite;
    };

    type Mutation<'a> = (&'a (Form, wds_core::search::Certificate), &'a dyn Fn(&mut wds_core::search::Certificate));
    let mutations: Vec<Mutation> = vec![
        (&psd, &flip_status),
        (&psd, &delete_node),
        (&psd, &rewrite_path),
        (&psd, &corrupt_scale),
        (&psd, &forge_digest),
        (&psd, &escalate_claim),
        (&psd, &drop_zeros_claim_pd),
        (&refuted, &flip_status),
        (&refuted, &delete_node),
        (&refuted, &rewrite_path),
        (&refuted, &corrupt_scale),
        (&refuted, &forge_digest),
        (&refuted, &escalate_claim),
        (&refuted, &drop_zeros_claim_pd),
        (&pd, &flip_status),
        (&pd, &delete_node),
        (&pd, &rewrite_path),
        (&pd, &corrupt_scale),
        (&pd, &forge_digest),
        (&pd, &downgrade_claim),
    ];
    assert_eq!(mutations.len(), 20);
    for (i, ((f, cert), mutate)) in mutations.into_iter().enumerate() {
        let mut c = cert.clone();
        mutate(&mut c);
        assert!(
            verify_certificate(f, &c).is_err(),
            "mutation {i} on {f} still verifies"
        );
    }
    println!("criterion 08 (certificate replay on corpus + named, 20 mutations rejected): PASS");
}

#[test]
fn criterion_09_determinism_and_parallel_agreement() {
    let corpus = soundness_corpus();
    let cfg = soundness_config();
    let subset: Vec<&Form> = corpus.iter().take(40).collect();
    for f in subset {
        let reference = classify(f, &cfg);
        let ref_bytes = serde_json::to_vec(reference.certificate()).unwrap();
        for _ in 0..2 {
            let again = classify(f, &cfg);
            assert_eq!(
                serde_json::to_vec(again.certificate()).unwrap(),
                ref_bytes,
                "sequential rerun differs on {f}"
            );
        }
        let par_cfg = SearchConfig { parallel_workers: 4, ..cfg.clone() };
        let par = classify(f, &par_cfg);
        assert_eq!(par.kind(), reference.kind(), "parallel verdict differs on {f}");
        if let Verdict::NotPsd { witness, .. } = &par {
            assert!(verify_witness(f, witness), "parallel witness fails on {f}");
        }
    }
    println!("criterion 09 (3x byte-identical sequential, 4-worker agreement, 40 forms): PASS");
}

#[test]
fn criterion_10_cell_value_variation_bound() {
    let mut rng = SplitMix64::new(1010);
    for trial in 0..200 {
        let n = 2 + rng.below(3) as usize; // 2..=4
        let d = 1 + rng.below(5) as u32;
        let f = random_form(&mut rng, n, d, 9);
        let depth = 1 + rng.below(6) as u32; // 1..=6
        let c = random_path(&mut rng, n, depth as usize);
        let p = random_cell_point(&mut rng, &c);
        let q = random_cell_point(&mut rng, &c);
        let diff = (f.evaluate(&p).unwrap() - f.evaluate(&q).unwrap()).abs();
        // n * M * 2^(d-1) * (d+1)^(n-1) * ((n-1)/n)^depth, all exact.
        let m = BigRational::from(BigInt::from(f.coefficient_bound()));
        let bound = BigRational::from(BigInt::from(n as u64))
            * m
            * BigRational::from(BigInt::from(1u64 << (d - 1)))
            * BigRational::from(BigInt::from((d as u64 + 1).pow(n as u32 - 1)))
            * contraction_bound(n, depth);
        assert!(
            diff <= bound,
            "trial {trial}: |f(p)-f(q)| = {} over the bound {} (n={n}, d={d}, m={depth})",
            diff,
            bound
        );
    }
    println!("criterion 10 (cell value-variation bound, 200 triples): PASS");
}

#[test]
fn minimum_lower_bound_consistency_with_grid() {
    // For forms certified strictly positive, every grid value must clear
    // the exact lower bound on the simplex minimum. Negative grid values
    // only bound the true minimum from above, so refuted forms are recorded
    // as non-falsifying rather than checked.
    let mut rng = SplitMix64::new(0xBEEF);
    let cfg = soundness_config();
    let mut positive_checked = 0;
    let mut non_falsifying = 0;
    for _ in 0..60 {
        let n = 2 + rng.below(2) as usize;
        let d = 1 + rng.below(3) as u32;
        let f = random_form(&mut rng, n, d, 3);
        let m = f.coefficient_bound();
        let c1 = bounds::c1_lower_bound(&m, n as u32, d).unwrap();
        match classify(&f, &cfg) {
            Verdict::PositiveDefinite { .. } => {
                let (min200, _) = oracle::grid_min(&f, 200).unwrap();
                assert!(
                    min200 >= c1,
                    "{f}: certified positive but grid min {min200} below the lower bound {c1}"
                );
                positive_checked += 1;
            }
            _ => non_falsifying += 1,
        }
    }
    assert!(positive_checked > 0, "corpus produced no positive-definite samples");
    println!(
        "minimum lower bound vs grid ({positive_checked} positive, {non_falsifying} non-falsifying): PASS"
    );
}

#[test]
fn bfs_traversal_and_probe_consistency() {
    // Cross-module smoke retained alongside the numbered criteria: both
    // traversals and the random probe agree with verdict signs.
    let mut rng = SplitMix64::new(77);
    for _ in 0..25 {
        let n = 2 + rng.below(2) as usize;
        let d = 1 + rng.below(3) as u32;
        let f = random_form(&mut rng, n, d, 5);
        let dfs = classify(&f, &SearchConfig::default());
        let bfs = classify(
            &f,
            &SearchConfig { traversal: wds_core::search::Traversal::BreadthFirst, ..SearchConfig::default() },
        );
        assert_eq!(dfs.kind(), bfs.kind());
        let (probe_min, _) = oracle::random_probe(&f, 40, 9);
        match dfs.kind() {
            VerdictKind::PositiveDefinite => assert!(probe_min.is_positive()),
            VerdictKind::PositiveSemidefinite => assert!(!probe_min.is_negative()),
            _ => {}
        }
    }
    println!("traversal and probe consistency: PASS");
}

#[test]
fn witness_paths_replay_to_their_cells() {
    // The recorded path of a witness reaches a cell whose vertex is the
    // witness point, tying certificates and witnesses together.
    let corpus = soundness_corpus();
    let cfg = soundness_config();
    let mut checked = 0;
    for f in corpus.iter().take(120) {
        if let Verdict::NotPsd { witness, .. } = classify(f, &cfg) {
            let c = ComposedSubstitution::from_path(f.n(), &witness.path).unwrap();
            let found = (1..=f.n()).any(|i| c.cell_vertex(i) == witness.point);
            assert!(found, "witness point of {f} is not a vertex of its recorded cell");
            checked += 1;
        }
    }
    assert!(checked > 0);
    println!("witness cell replay ({checked} refutations): PASS");
}
