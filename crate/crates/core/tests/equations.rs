mod common;

use std::collections::BTreeSet;

use common::*;
use slpwq::alphabet::{Alphabet, VarRef, Word};
use slpwq::equations::*;
use slpwq::slp::Slp;
use slpwq::Var;

#[test]
fn atoms_are_the_maximal_free_intervals() {
    let mut rng = rng(31);
    for _ in 0..300 {
        let (s, sigma) = random_system(&mut rng, 30, 8);
        assert!(verify_solution(&s, &sigma).unwrap());
        let (dec, g) = analyse(&s, &sigma);
        let mut closure = Closure::new(&dec);
        let atoms: BTreeSet<_> = dec.atoms.iter().map(|a| (a.eq, a.start, a.end)).collect();
        assert_eq!(atoms, closure.maximal_free(&dec));
        let d = s.denotational_length();
        assert!(dec.classes_up_to_involution() <= 2 * d - 2, "{} classes with d = {d}", dec.classes_up_to_involution());
        for c in &dec.classes {
            assert_eq!(dec.classes[c.bar].bar, dec.classes.iter().position(|x| std::ptr::eq(x, c)).unwrap());
            for &(e, a, b) in &c.members {
                let (lo, hi) = (a.min(b), a.max(b));
                let w = dec.words[e].factor(&s.alphabet, lo, hi);
                assert_eq!(if a < b { w } else { w.inverse(&s.alphabet) }, c.word);
            }
        }
        // the classes are the ≈-classes of the oriented atoms
        let nodes: Vec<(usize, usize)> = dec
            .atoms
            .iter()
            .flat_map(|a| [(closure.root(a.eq, a.start, a.end), a.class), (closure.root(a.eq, a.end, a.start), dec.classes[a.class].bar)])
            .collect();
        for &(r1, c1) in &nodes {
            for &(r2, c2) in &nodes {
                assert_eq!(r1 == r2, c1 == c2);
            }
        }
        for x in (0..s.variables.len() as u32).map(Var) {
            assert_eq!(&g.interpret(g.sigma[x.index()].as_ref().unwrap()), sigma.get(x).unwrap());
        }
    }
}

/// Flat donors for `ω`.
fn flat_donor(al: &Alphabet, g: &GenericSolution, omega: &[Word]) -> (Slp<u64>, Vec<Option<VarRef>>) {
    let mut donor = Slp::new(al.clone());
    let refs = g.alphabet.letters().map(|a| Some(donor.push_word(&omega[a.index()]).unwrap())).collect();
    (donor, refs)
}

#[test]
fn compressed_generic_solutions_evaluate_exactly() {
    let mut rng = rng(32);
    for _ in 0..300 {
        let (s, sigma) = random_system(&mut rng, 30, 8);
        let (dec, g) = analyse(&s, &sigma);
        let c = compress_generic::<u64>(&dec, &g, &s).unwrap();
        check_compressed(&s, &g, &c);
        let (donor, omega) = flat_donor(&s.alphabet, &g, &g.omega);
        let sub = substitute_intervals(&c.slp, &donor, &omega).unwrap();
        let binding: Vec<Option<VarRef>> = c.vars.iter().map(|v| v.map(|v| sub.map[v.var.index()].flipped(v.bar))).collect();
        for x in (0..s.variables.len() as u32).map(Var) {
            assert_eq!(&sub.slp.eval(binding[x.index()].unwrap(), 1 << 20).unwrap(), sigma.get(x).unwrap());
        }
        assert!(verify_solution_compressed(&s, &sub.slp, &binding).unwrap());
    }
}

fn example() -> (EquationSystem, Solution) {
    let mut al = Alphabet::new();
    for c in ["a", "b", "c"] {
        al.add_pair(c, &format!("{c}\u{304}")).unwrap();
    }
    let mut s = EquationSystem::new(al);
    s.add_equation("A X B ~X ~A", "Y ~B Y ~A B ~Y").unwrap();
    s.add_constant("A", "a").unwrap();
    s.add_constant("B", "b").unwrap();
    let mut sigma = Solution::new(&s);
    for (x, w) in [("X", "b c b c̄ b̄ b̄ a b c"), ("Y", "a b c b c̄ b̄"), ("A", "a"), ("B", "b")] {
        sigma.set(s.var(x).unwrap(), s.alphabet.parse_word(w).unwrap());
    }
    (s, sigma)
}

#[test]
fn example_compresses_and_substitutes() {
    let (s, sigma) = example();
    let (dec, g) = analyse(&s, &sigma);
    let c = compress_generic::<u64>(&dec, &g, &s).unwrap();
    check_compressed(&s, &g, &c);
    let al = &s.alphabet;
    let bc = dec.classes.iter().position(|c| al.format_word(&c.word) == "b c").unwrap();
    let bc_letter = g.letters[bc];
    let run = |omega: Vec<Word>| {
        let (donor, refs) = flat_donor(al, &g, &omega);
        let sub = substitute_intervals(&c.slp, &donor, &refs).unwrap();
        let binding: Vec<Option<VarRef>> = c.vars.iter().map(|v| v.map(|v| sub.map[v.var.index()].flipped(v.bar))).collect();
        assert!(verify_solution_compressed(&s, &sub.slp, &binding).unwrap());
        sub.slp.eval(binding[s.var("X").unwrap().index()].unwrap(), 1 << 10).unwrap()
    };
    let mut omega = g.omega.clone();
    omega[bc_letter.index()] = al.parse_word("b c c").unwrap();
    omega[g.alphabet.bar(bc_letter).index()] = al.parse_word("c̄ c̄ b̄").unwrap();
    assert_eq!(al.format_word(&run(omega)), "b c c b c̄ c̄ b̄ b̄ a b c c");
    // all classes longer than a letter erased
    let omega: Vec<Word> = g.omega.iter().map(|w| if w.len() > 1 { Word::empty() } else { w.clone() }).collect();
    assert!(run(omega).len() < sigma.get(s.var("X").unwrap()).unwrap().len());
}

#[test]
fn substitution_rejects_incompatible_donors() {
    let (s, sigma) = example();
    let (dec, g) = analyse(&s, &sigma);
    let c = compress_generic::<u64>(&dec, &g, &s).unwrap();
    let mut omega = g.omega.clone();
    let bc = g.letters[dec.classes.iter().position(|c| s.alphabet.format_word(&c.word) == "b c").unwrap()];
    omega[g.alphabet.bar(bc).index()] = s.alphabet.parse_word("b c").unwrap();
    let (donor, refs) = flat_donor(&s.alphabet, &g, &omega);
    assert!(matches!(substitute_intervals(&c.slp, &donor, &refs), Err(slpwq::Error::InvolutionMismatch(_))));
}

#[test]
fn compressed_size_is_polylogarithmic() {
    let mut points = Vec::new();
    for k in 4..=16 {
        let (s, sigma) = commuting_power((1 << k) - 1);
        let (dec, g) = analyse(&s, &sigma);
        assert_eq!(g.length(), 1 << k);
        let c = compress_generic::<u64>(&dec, &g, &s).unwrap();
        check_compressed(&s, &g, &c);
        points.push((k as f64, c.slp.size() as f64));
    }
    // size against log Ñ grows at most quadratically, with a stable constant
    let e = fit_exponent(&points);
    assert!(e <= 2.2, "exponent {e}, sizes {points:?}");
    let c: Vec<f64> = points.iter().map(|&(k, size)| size / (16.0 * k * k)).collect();
    let (lo, hi) = c.iter().fold((f64::MAX, 0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    assert!(hi <= 2.0 * lo, "constants {c:?}");
}

#[test]
fn degenerate_systems_give_flat_grammars() {
    let mut al = Alphabet::new();
    al.add_pair("a", "ā").unwrap();
    let mut s = EquationSystem::new(al);
    s.add_equation("X", "Y").unwrap();
    let mut sigma = Solution::new(&s);
    let w = s.alphabet.parse_word("a a a").unwrap();
    sigma.set(Var(0), w.clone());
    sigma.set(Var(1), w);
    let (dec, g) = analyse(&s, &sigma);
    assert_eq!(g.length(), 1);
    let c = compress_generic::<u64>(&dec, &g, &s).unwrap();
    assert!(c.slp.max_height() <= 1);
    check_compressed(&s, &g, &c);
}
