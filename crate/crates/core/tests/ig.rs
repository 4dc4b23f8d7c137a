mod common;

use common::*;
use slpwq::ig::{ig_to_slp, IgRule, IntervalGrammar};
use slpwq::slp::{fibonacci, SlpBuilder, DEFAULT_CAP};

#[test]
fn conversion_preserves_every_slice() {
    let mut rng = rng(31);
    let mut worst: f64 = 0.0;
    for round in 0..200 {
        let ig = random_ig(&mut rng, 2, 20 + round % 80, 3000);
        let words = naive_ig_eval(&ig);
        for v in ig.vars() {
            assert_eq!(ig.eval(v.pos(), DEFAULT_CAP).unwrap().0, words[v.index()]);
        }
        let conv = ig_to_slp(&ig).unwrap();
        for v in ig.vars() {
            assert_eq!(conv.slp.eval(conv.vars[v.index()], DEFAULT_CAP).unwrap().0, words[v.index()]);
            for s in match ig.rule(v) {
                IgRule::Terminal(_) => vec![],
                IgRule::Slice(s) => vec![s.clone()],
                IgRule::SlicePair(s, t) => vec![s.clone(), t.clone()],
            } {
                let out = conv.slice(&ig, s.var, &s.lo, &s.hi).expect("every occurring slice is mapped");
                let want = ig.extract(s.var, &s.lo, &s.hi, DEFAULT_CAP).unwrap();
                assert_eq!(conv.slp.eval(out, DEFAULT_CAP).unwrap(), want);
            }
        }
        // the output must survive a round trip through validation
        let mut b = SlpBuilder::new(conv.slp.alphabet().clone());
        for v in conv.slp.vars() {
            let name = conv.slp.name(v).to_string();
            match conv.slp.rule(v) {
                slpwq::slp::Rule::Terminal(Some(a)) => {
                    b.terminal(&name, conv.slp.alphabet().name(a));
                }
                slpwq::slp::Rule::Terminal(None) => {
                    b.empty(&name);
                }
                slpwq::slp::Rule::Pair(y, z) => {
                    b.pair(&name, &conv.slp.display(y), &conv.slp.display(z));
                }
            }
        }
        b.build::<u64>().unwrap();
        let n = ig.num_vars() as f64;
        let bound = ig.max_height() as f64 * n + n;
        worst = worst.max(conv.stats.rules as f64 / bound);
    }
    assert!(worst <= 8.0, "rules / (h*|Omega| + |Omega|) reached {worst}");
}

#[test]
fn slps_convert_to_themselves() {
    let slp = fibonacci::<u64>(12);
    let ig = IntervalGrammar::from_slp(&slp);
    let conv = ig_to_slp(&ig).unwrap();
    for v in slp.vars() {
        assert_eq!(conv.slp.eval(conv.vars[v.index()], DEFAULT_CAP).unwrap(), slp.eval(v.pos(), DEFAULT_CAP).unwrap());
    }
    assert!(conv.stats.rules <= 2 * slp.num_vars());
}

#[test]
fn size_grows_at_most_quadratically() {
    let mut points = Vec::new();
    for (i, vars) in [20usize, 40, 80, 160, 320].into_iter().enumerate() {
        let mut total = 0.0;
        for s in 0..5 {
            let mut rng = rng(1000 + 10 * i as u64 + s);
            let ig = random_ig(&mut rng, 2, vars, u64::MAX / 4);
            total += ig_to_slp(&ig).unwrap().stats.rules as f64;
        }
        points.push((vars as f64, total / 5.0));
    }
    let e = fit_exponent(&points);
    assert!(e <= 2.2, "fitted exponent {e}");
}
