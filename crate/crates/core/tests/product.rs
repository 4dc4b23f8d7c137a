mod common;

use common::*;
use rand::Rng;
use slpwq::alphabet::{Letter, Word};
use slpwq::equations::{compute_cuts, maximal_free_intervals, Solution};
use slpwq::product::*;
use slpwq::query::equal_eval;
use slpwq::slp::Slp;

#[test]
fn reorder_exhaustive() {
    let mut checked = 0;
    for k in 1..=4 {
        for n in 1..=10 {
            for w in reduced_sequences(k, n) {
                let (out, shape) = reorder(&w).unwrap();
                let v = out.expand();
                assert!(v.windows(2).all(|p| p[0] != p[1]), "{w:?} -> {v:?}");
                assert_eq!(counts(&v, k), counts(&w, k), "{w:?}");
                assert_eq!((v[0], v[v.len() - 1]), (w[0], w[n - 1]), "{w:?}");
                assert!(out.runs.iter().all(|r| r.0 != r.1 && r.2 > 0));
                assert!(conforms(&w, &out, shape), "{w:?} -> {out:?} as {shape:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 100_000);
}

#[test]
fn reorder_examples_and_errors() {
    let (out, _) = reorder(&[0, 1, 0, 1]).unwrap();
    assert_eq!(out.runs, vec![(0, 1, 2)]);
    let (out, _) = reorder(&[0, 1, 2]).unwrap();
    assert_eq!(out.expand(), vec![0, 1, 2]);
    assert_eq!(reorder(&[]), Err(slpwq::Error::EmptyInput));
    assert!(matches!(reorder(&[0, 0]), Err(slpwq::Error::NotReduced(_))));
}

fn block(alpha: usize, g: &[i64]) -> (usize, Vec<i64>) {
    (alpha, g.to_vec())
}

#[test]
fn parikh_of_words() {
    let spec = zz_spec();
    let w = |t: &str| spec.alphabet.parse_word(t).unwrap();
    let p = parikh_of_word(&spec, &w("a a b b b"));
    assert_eq!(p.counts, vec![1, 1]);
    assert_eq!(p.abelian, vec![vec![2], vec![3]]);
    assert_eq!((p.first, p.last), (Some(0), Some(1)));
    assert_eq!(parikh_of_word(&spec, &Word::empty()), ExtendedParikhImage::empty(&spec));
    let p = parikh_of_word(&spec, &w("b a a\u{304} b"));
    assert_eq!((p.counts.clone(), p.first, p.last), (vec![0, 1], Some(1), Some(1)));
    assert_eq!(p.abelian[1], vec![2]);
}

#[test]
fn products_of_reduced_words() {
    let spec = zz_spec();
    let d = |b: Vec<(usize, Vec<i64>)>| DeltaWord { blocks: b };
    assert!(reduce_product(&spec, &d(vec![block(0, &[1])]), &d(vec![block(0, &[-1])])).is_empty());
    let u = d(vec![block(0, &[2]), block(1, &[1])]);
    let v = d(vec![block(1, &[-1]), block(0, &[3])]);
    assert_eq!(reduce_product(&spec, &u, &v), d(vec![block(0, &[5])]));

    let mut rng = rng(41);
    let spec = mixed_spec(3);
    for _ in 0..500 {
        let [u, v, w] = [0; 3].map(|_| {
            let n = rng.gen_range(0..6);
            random_delta(&mut rng, &spec, n, 3)
        });
        let uv = reduce_product(&spec, &u, &v);
        assert!(uv.is_reduced(&spec));
        // letter-by-letter multiplication of the canonical strings
        assert_eq!(uv, spec.normal_form(&spec.canonical(&u).concat(&spec.canonical(&v))));
        assert_eq!(reduce_product(&spec, &uv, &w), reduce_product(&spec, &u, &reduce_product(&spec, &v, &w)));
        assert!(reduce_product(&spec, &u, &u.inverse(&spec)).is_empty());
    }
}

#[test]
fn canonical_blocks_are_closed_under_inversion() {
    let mut spec = ProductSpec::new();
    spec.add_factor("g", 2, &[6, 4, 2, 5], None).unwrap();
    spec.add_factor("t", 0, &[2], None).unwrap();
    let mut rng = rng(42);
    for _ in 0..500 {
        let alpha = rng.gen_range(0..2);
        let g = random_elem(&mut rng, &spec, alpha, 7);
        let f = &spec.factors[alpha];
        let w = f.canonical(&spec.alphabet, &g);
        assert_eq!(spec.normal_form(&w).blocks, vec![(alpha, g.clone())]);
        assert_eq!(f.canonical(&spec.alphabet, &f.neg(&g)), w.inverse(&spec.alphabet));
        assert!(spec.is_canonical_word(&w));
    }
    let a = spec.alphabet.letter("g1").unwrap();
    assert!(!spec.is_canonical_word(&Word(vec![a, a, spec.alphabet.bar(a)])));
}

#[test]
fn block_data_of_programs() {
    let spec = zz_spec();
    let (a, b) = (spec.alphabet.letter("a").unwrap(), spec.alphabet.letter("b").unwrap());
    let mut slp: Slp<u64> = Slp::new(spec.alphabet.clone());
    let la = slp.letter_var(a);
    let big = slp.push_power(la, &(1 << 20)).unwrap();
    let p = parikh_of_slp(&spec, &slp, big).unwrap();
    assert_eq!((p.counts, p.abelian, p.first, p.last), (vec![1, 0], vec![vec![1 << 20], vec![0]], Some(0), Some(0)));
    let lb = slp.letter_var(b);
    let ab = slp.push_pair(None, la, lb).unwrap().pos();
    let abk = slp.push_power(ab, &(1 << 10)).unwrap();
    let p = parikh_of_slp(&spec, &slp, abk).unwrap();
    assert_eq!((p.counts, p.abelian, p.first, p.last), (vec![1 << 10, 1 << 10], vec![vec![1 << 10], vec![1 << 10]], Some(0), Some(1)));
    let aa = slp.push_pair(None, la, la.inverse()).unwrap().pos();
    assert!(!is_reduced_slp(&spec, &slp, aa).unwrap());
    assert!(matches!(parikh_of_slp(&spec, &slp, aa), Err(slpwq::Error::NotReduced(_))));
    let aba = slp.push_pair(None, ab, la).unwrap().pos();
    assert!(is_reduced_slp(&spec, &slp, aba).unwrap());

    let mut rng = rng(43);
    let spec = mixed_spec(3);
    let letters: Vec<Letter> = spec.alphabet.letters().collect();
    for round in 0..600 {
        let w = if round % 2 == 0 {
            let n = rng.gen_range(0..40);
            spec.canonical(&random_delta(&mut rng, &spec, n, 300))
        } else {
            let n = rng.gen_range(0..30);
            Word((0..n).map(|_| letters[rng.gen_range(0..letters.len())]).collect())
        };
        assert!(w.len() <= 10_000);
        let mut slp: Slp<u64> = Slp::new(spec.alphabet.clone());
        let x = random_tree(&mut rng, &mut slp, w.letters());
        for r in [x, x.inverse()] {
            let plain = slp.eval(r, 1 << 20).unwrap();
            assert_eq!(is_reduced_slp(&spec, &slp, r).unwrap(), spec.is_reduced_word(&plain), "{}", spec.alphabet.format_word(&plain));
            assert_eq!(is_canonical_slp(&spec, &slp, r).unwrap(), spec.is_canonical_word(&plain));
            if spec.is_reduced_word(&plain) {
                assert_eq!(parikh_of_slp(&spec, &slp, r).unwrap(), parikh_of_word(&spec, &plain));
            }
        }
    }
}

#[test]
fn compressed_reduction_matches_products() {
    let mut rng = rng(44);
    let spec = mixed_spec(3);
    for _ in 0..400 {
        let nu = rng.gen_range(0..8);
        let u = random_delta(&mut rng, &spec, nu, 50);
        // a long common part makes cancellation likely
        let nv = rng.gen_range(0..8);
        let mut v = random_delta(&mut rng, &spec, nv, 50);
        if rng.gen_bool(0.6) {
            let k = rng.gen_range(0..=u.len());
            let mut head = DeltaWord { blocks: u.blocks[u.len() - k..].to_vec() }.inverse(&spec);
            if rng.gen_bool(0.5) && !head.is_empty() {
                let (a, g) = head.blocks.pop().unwrap();
                let h = random_elem(&mut rng, &spec, a, 50);
                head.push(&spec, a, spec.factors[a].add(&g, &h));
            }
            v = reduce_product(&spec, &head, &v);
        }
        let mut slp: Slp<u64> = Slp::new(spec.alphabet.clone());
        let x = random_tree(&mut rng, &mut slp, spec.canonical(&u).letters());
        let y = random_tree(&mut rng, &mut slp, spec.canonical(&v).letters());
        let mut analysis = BlockAnalysis::new();
        let z = reduce_concat(&spec, &mut slp, &mut analysis, x, y).unwrap();
        assert_eq!(slp.eval(z, 1 << 20).unwrap(), spec.canonical(&reduce_product(&spec, &u, &v)));
    }
}

#[test]
fn splitting_triangles() {
    let spec = zz_spec();
    let d = |b: Vec<(usize, Vec<i64>)>| DeltaWord { blocks: b };
    let t = split_triangle(&spec, &d(vec![block(0, &[1])]), &d(vec![block(0, &[-1])]));
    assert_eq!((t.a.clone(), t.b.clone()), (d(vec![block(0, &[1])]), d(vec![block(0, &[-1])])));
    assert!(t.c.is_empty() && t.p.is_empty() && t.q.is_empty() && t.r.is_empty());
    let t = split_triangle(&spec, &d(vec![block(0, &[2]), block(1, &[1])]), &d(vec![block(1, &[2])]));
    assert_eq!(t.a, d(vec![block(1, &[1])]));
    assert_eq!(t.b, d(vec![block(1, &[2])]));
    assert_eq!(t.c, d(vec![block(1, &[3])]));
    assert_eq!(t.p, d(vec![block(0, &[2])]));
    assert!(t.q.is_empty() && t.r.is_empty());
}

#[test]
fn split_systems_are_solved_by_the_extension() {
    let mut rng = rng(45);
    for _ in 0..100 {
        let (sys, sigma) = planted_product_system(&mut rng, 3, 4, 20);
        let split = triangulate_and_split(&sys, &sigma).unwrap();
        assert!(slpwq::equations::verify_solution(&split.strings, &split.sigma).unwrap());
        for (x, c) in &split.constraints {
            assert!(c.holds(&parikh_of_word(&sys.spec, split.sigma.get(*x).unwrap())));
        }
    }
}

#[test]
fn planted_certificates() {
    let mut rng = rng(46);
    for round in 0..60 {
        let (mut sys, sigma) = planted_product_system(&mut rng, 1 + round % 3, 6, 300);
        pin_all(&mut sys, &sigma);
        let (cert, _) = compress_solution_parikh::<u64>(&sys, &sigma).unwrap();
        assert!(verify_certificate(&sys, &cert).unwrap());
        for (i, b) in cert.bindings.iter().enumerate() {
            let (Some(b), Some(w)) = (b, &sigma.words[i]) else { continue };
            assert_eq!(parikh_of_slp(&sys.spec, &cert.slp, *b).unwrap(), parikh_of_word(&sys.spec, w));
            // one more generator on either side changes an abelian coordinate
            let a = sys.spec.alphabet.positives().nth(rng.gen_range(0..sys.spec.factors.len())).unwrap();
            let mut bad = cert.clone();
            let l = bad.slp.letter_var(a);
            let nb = if rng.gen_bool(0.5) { bad.slp.concat(*b, l) } else { bad.slp.concat(l, *b) }.unwrap();
            bad.bindings[i] = Some(nb);
            assert!(!verify_certificate(&sys, &bad).unwrap());
        }
        let (cert, _) = compress_solution_alphabetic::<u64>(&sys, &sigma).unwrap();
        assert!(verify_certificate(&sys, &cert).unwrap());
        for (i, b) in cert.bindings.iter().enumerate() {
            if let (Some(b), Some(w)) = (b, &sigma.words[i]) {
                let mut s = cert.slp.clone();
                let direct = s.push_word(w).unwrap();
                assert!(equal_eval(&s, *b, direct));
            }
        }
    }
}

#[test]
fn example_over_three_infinite_cyclic_factors() {
    let mut spec = ProductSpec::new();
    for (f, l) in [("x", "a"), ("y", "b"), ("z", "c")] {
        spec.add_factor(f, 1, &[], Some(&[l])).unwrap();
    }
    let mut sys = ProductSystem::new(spec.clone());
    sys.add_equation("A X B ~X ~A", "Y ~B Y ~A B ~Y").unwrap();
    let mut sigma = Solution::new(&sys.equations);
    for (x, w) in [("X", "b c b c̄ b̄ b̄ a b c"), ("Y", "a b c b c̄ b̄"), ("A", "a"), ("B", "b")] {
        sigma.set(sys.equations.var(x).unwrap(), spec.alphabet.parse_word(w).unwrap());
    }
    pin_all(&mut sys, &sigma);
    let mut dec = compute_cuts(&sys.equations, &sigma).unwrap();
    assert_eq!(dec.cuts[0], vec![0, 1, 6, 7, 10, 11, 13, 14, 15, 20, 21]);
    maximal_free_intervals(&mut dec, &spec.alphabet);
    assert_eq!((dec.atoms.len(), dec.classes_up_to_involution()), (15, 3));
    for compress in [compress_solution_parikh::<u64>, compress_solution_alphabetic::<u64>] {
        let (cert, _) = compress(&sys, &sigma).unwrap();
        assert!(verify_certificate(&sys, &cert).unwrap());
    }
}

#[test]
fn verifier_rejects_wrong_first_factor_and_missing_values() {
    let spec = zz_spec();
    let mut sys = ProductSystem::new(spec.clone());
    sys.add_equation("X Y", "Z").unwrap();
    let mut sigma = Solution::new(&sys.equations);
    for (x, w) in [("X", "a a b"), ("Y", "b̄ a"), ("Z", "a a a")] {
        sigma.set(sys.equations.var(x).unwrap(), spec.alphabet.parse_word(w).unwrap());
    }
    let x = sys.equations.var("X").unwrap();
    sys.constraints.push((x, ParikhConstraint::Alphabetic { alph: vec![0, 1], first: Some(0), last: Some(1) }));
    let (cert, _) = compress_solution_alphabetic::<u64>(&sys, &sigma).unwrap();
    assert!(verify_certificate(&sys, &cert).unwrap());
    // X = b a a b a: same alphabet, wrong first factor; Y, Z adjusted
    let mut bad = cert.clone();
    let w = spec.alphabet.parse_word("b a a").unwrap();
    let pre = bad.slp.push_word(&w).unwrap();
    let bx = bad.slp.concat(pre, cert.bindings[0].unwrap()).unwrap();
    bad.bindings[0] = Some(bx);
    let bz = bad.slp.concat(pre, cert.bindings[2].unwrap()).unwrap();
    bad.bindings[2] = Some(bz);
    assert!(!verify_certificate(&sys, &bad).unwrap());
    bad.bindings[1] = None;
    assert!(matches!(verify_certificate(&sys, &bad), Err(slpwq::Error::MissingAssignment(_))));
}
