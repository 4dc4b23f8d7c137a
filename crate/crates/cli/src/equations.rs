//! Verbs on word equations with given solutions.

use std::path::PathBuf;

use serde_json::json;
use slpwq::equations::{
    compress_generic, compute_cuts, generic_solution, maximal_free_intervals, substitute_intervals,
    verify_solution, verify_solution_compressed, CutDecomposition, EquationSystem, Solution,
};
use slpwq::text::{bindings_for, format_bound_slp, parse_bound_slp, parse_solution, parse_system};
use slpwq::{Len, Slp, VarRef};

use crate::{load, CliError, CliResult, Outcome};

fn load_pair(system: &PathBuf, solution: &PathBuf) -> CliResult<(EquationSystem, Solution)> {
    let sys = load(system, parse_system)?;
    let sigma = load(solution, |t| parse_solution(&sys, t))?;
    Ok((sys, sigma))
}

fn decompose(sys: &EquationSystem, sigma: &Solution) -> CliResult<CutDecomposition> {
    let mut dec = compute_cuts(sys, sigma)?;
    maximal_free_intervals(&mut dec, &sys.alphabet);
    Ok(dec)
}

fn counted(mut o: Outcome, dec: &CutDecomposition) -> Outcome {
    o.class_count = Some(dec.classes_up_to_involution());
    let len: usize = dec.words.iter().map(|w| w.len()).sum();
    o.size("atoms", dec.atoms.len()).size("classes", dec.classes.len()).size("solution_length", len)
}

pub fn cuts(system: &PathBuf, solution: &PathBuf) -> CliResult<Outcome> {
    let (sys, sigma) = load_pair(system, solution)?;
    let dec = decompose(&sys, &sigma)?;
    let mut text = String::new();
    for (i, c) in dec.cuts.iter().enumerate() {
        let c: Vec<String> = c.iter().map(usize::to_string).collect();
        text.push_str(&format!("equation {i}: {}\n", c.join(" ")));
    }
    text.push_str(&format!("classes {}\n", dec.classes_up_to_involution()));
    let res = json!({ "cuts": dec.cuts, "derived_cuts": dec.derived_cuts });
    Ok(counted(Outcome::new(text, res), &dec))
}

pub fn mfi(system: &PathBuf, solution: &PathBuf) -> CliResult<Outcome> {
    let (sys, sigma) = load_pair(system, solution)?;
    let dec = decompose(&sys, &sigma)?;
    let al = &sys.alphabet;
    let mut text = String::new();
    let mut classes = Vec::new();
    for (i, c) in dec.classes.iter().enumerate() {
        let members: Vec<String> = c.members.iter().map(|&(e, a, b)| format!("{e}:[{a},{b}]")).collect();
        let word = al.format_word(&c.word);
        text.push_str(&format!("class {i} (bar {}) \"{word}\": {}\n", c.bar, members.join(" ")));
        classes.push(json!({ "word": word, "bar": c.bar, "members": c.members }));
    }
    let atoms: Vec<_> = dec.atoms.iter().map(|a| json!([a.eq, a.start, a.end, a.class])).collect();
    let res = json!({ "atoms": atoms, "classes": classes });
    Ok(counted(Outcome::new(text, res), &dec))
}

pub fn generic(system: &PathBuf, solution: &PathBuf) -> CliResult<Outcome> {
    let (sys, sigma) = load_pair(system, solution)?;
    let dec = decompose(&sys, &sigma)?;
    let g = generic_solution(&dec, &sys);
    let mut text = format!("{}\n", g.alphabet.declaration());
    let mut omega = serde_json::Map::new();
    for a in g.alphabet.positives() {
        let w = sys.alphabet.format_word(&g.omega[a.index()]);
        text.push_str(&format!("omega {} = \"{w}\"\n", g.alphabet.name(a)));
        omega.insert(g.alphabet.name(a).to_string(), json!(w));
    }
    let mut values = serde_json::Map::new();
    for (i, w) in g.sigma.iter().enumerate() {
        if let Some(w) = w {
            let w = g.alphabet.format_word(w);
            text.push_str(&format!("{} = \"{w}\"\n", sys.variables[i]));
            values.insert(sys.variables[i].clone(), json!(w));
        }
    }
    let res = json!({ "alphabet": g.alphabet.declaration(), "omega": omega, "solution": values });
    Ok(counted(Outcome::new(text, res).size("generic_length", g.length()), &dec))
}

pub fn compress(system: &PathBuf, solution: &PathBuf, interpret: bool) -> CliResult<Outcome> {
    let (sys, sigma) = load_pair(system, solution)?;
    let dec = decompose(&sys, &sigma)?;
    let g = generic_solution(&dec, &sys);
    let c = compress_generic::<Len>(&dec, &g, &sys)?;
    let generic_size = c.slp.size();
    let (slp, vars) = if interpret {
        let mut donor: Slp = Slp::new(sys.alphabet.clone());
        let omega = g
            .alphabet
            .letters()
            .map(|a| Ok(Some(donor.push_word(&g.omega[a.index()])?)))
            .collect::<slpwq::Result<Vec<Option<VarRef>>>>()?;
        let s = substitute_intervals(&c.slp, &donor, &omega)?;
        let vars: Vec<Option<VarRef>> = c.vars.iter().map(|v| v.map(|v| s.map[v.var.index()].flipped(v.bar))).collect();
        let (slp, roots) = s.slp.prune(&flat(&vars));
        (slp, rebind(&vars, &roots))
    } else {
        (c.slp, c.vars)
    };
    let text = format_bound_slp(&slp, &sys.variables, &vars);
    let o = Outcome::new(text.clone(), json!({ "slp": text }))
        .size("ig", c.ig_size)
        .size("generic_slp", generic_size)
        .size("output", slp.size())
        .size("generic_length", g.length())
        .height("output", slp.max_height());
    Ok(counted(o, &dec))
}

/// The bound values, in order.
fn flat(vars: &[Option<VarRef>]) -> Vec<VarRef> {
    vars.iter().flatten().copied().collect()
}

/// `vars` with its bound values replaced, in order, by `roots`.
fn rebind(vars: &[Option<VarRef>], roots: &[VarRef]) -> Vec<Option<VarRef>> {
    let mut it = roots.iter();
    vars.iter().map(|v| v.map(|_| *it.next().unwrap())).collect()
}

pub fn subst(compressed: &PathBuf, donor: &PathBuf) -> CliResult<Outcome> {
    let (c, cbinds): (Slp, _) = load(compressed, parse_bound_slp)?;
    let (d, dbinds): (Slp, _) = load(donor, parse_bound_slp)?;
    let gal = c.alphabet();
    let omega: Vec<Option<VarRef>> = gal
        .letters()
        .map(|a| dbinds.iter().find(|b| b.0 == gal.name(a)).map(|b| b.1))
        .collect();
    if let Some(a) = gal.letters().find(|&a| omega[a.index()].is_none() && omega[gal.bar(a).index()].is_none()) {
        return Err(CliError::Usage(format!("no donor bound to letter {}", gal.name(a))));
    }
    let s = substitute_intervals(&c, &d, &omega)?;
    let names: Vec<String> = cbinds.iter().map(|b| b.0.clone()).collect();
    let vars: Vec<Option<VarRef>> = cbinds.iter().map(|b| Some(s.map[b.1.var.index()].flipped(b.1.bar))).collect();
    let (slp, roots) = s.slp.prune(&flat(&vars));
    let vars = rebind(&vars, &roots);
    let text = format_bound_slp(&slp, &names, &vars);
    let o = Outcome::new(text.clone(), json!({ "slp": text }))
        .size("compressed", c.size())
        .size("donor", d.size())
        .size("output", slp.size());
    Ok(o)
}

pub fn verify(system: &PathBuf, solution: &PathBuf) -> CliResult<Outcome> {
    let (sys, sigma) = load_pair(system, solution)?;
    Ok(Outcome::answer(verify_solution(&sys, &sigma)?))
}

pub fn verify_slp(system: &PathBuf, slp: &PathBuf) -> CliResult<Outcome> {
    let sys = load(system, parse_system)?;
    let (slp, binds): (Slp, _) = load(slp, parse_bound_slp)?;
    let bindings = bindings_for(&slp, &sys.variables, &binds);
    let ok = verify_solution_compressed(&sys, &slp, &bindings)?;
    Ok(Outcome::answer(ok).size("slp", slp.size()))
}
