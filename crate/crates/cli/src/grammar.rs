//! Verbs on SLPs, interval grammars, compressed queries and free groups.

use std::path::PathBuf;

use serde_json::{json, Map, Value};
use slpwq::freegroup::{compressed_word_problem, endomorphism_word_problem, reduce_slp, schleimer_slp};
use slpwq::ig::ig_to_slp;
use slpwq::query::{answer_interval_questions, equal_eval, longest_common_prefix};
use slpwq::text::{format_bound_slp, format_slp, parse_endomorphisms, parse_ig, parse_questions, parse_slp};
use slpwq::{Len, Slp, VarRef};

use crate::{load, CliError, CliResult, Outcome};

pub fn load_slp(path: &PathBuf) -> CliResult<Slp> {
    load(path, parse_slp::<Len>)
}

pub fn var(slp: &Slp, name: &str) -> CliResult<VarRef> {
    Ok(slp.var_ref(name)?)
}

fn with_size(o: Outcome, slp: &Slp) -> Outcome {
    o.size("vars", slp.num_vars()).size("size", slp.size()).height("max", slp.max_height())
}

pub fn eval(path: &PathBuf, x: &str, cap: usize) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let x = var(&slp, x)?;
    let w = slp.alphabet().format_word(&slp.eval(x, cap)?);
    let res = json!({ "variable": slp.display(x), "length": slp.len(x).to_string(), "word": w });
    Ok(with_size(Outcome::new(w, res), &slp))
}

pub fn extract(path: &PathBuf, x: &str, from: &Len, to: &Len, cap: usize) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let x = var(&slp, x)?;
    let w = slp.alphabet().format_word(&slp.extract(x, from, to, cap)?);
    let res = json!({ "variable": slp.display(x), "from": from.to_string(), "to": to.to_string(), "word": w });
    Ok(Outcome::new(w, res))
}

pub fn factor(path: &PathBuf, patterns: &[String]) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let words = patterns.iter().map(|p| slp.alphabet().parse_word(p)).collect::<slpwq::Result<Vec<_>>>()?;
    let table = slp.factor_occurs(&words);
    let mut names: Vec<(&str, usize)> = slp.vars().map(|x| (slp.name(x), x.index())).collect();
    names.sort();
    let (mut text, mut res) = (String::new(), Map::new());
    for (p, pattern) in patterns.iter().enumerate() {
        let hits: Vec<&str> = names.iter().filter(|(_, i)| table[*i][p]).map(|(n, _)| *n).collect();
        text.push_str(&format!("{pattern}: {}\n", hits.join(" ")));
        res.insert(pattern.clone(), json!(hits));
    }
    Ok(Outcome::new(text, Value::Object(res)))
}

pub fn ig2slp(path: &PathBuf) -> CliResult<Outcome> {
    let ig = load(path, parse_ig::<Len>)?;
    let conv = ig_to_slp(&ig)?;
    let text = format_slp(&conv.slp);
    let o = Outcome::new(text.clone(), json!({ "slp": text }))
        .size("ig_vars", ig.num_vars())
        .size("ig_size", ig.size())
        .size("slp_vars", conv.slp.num_vars())
        .size("slp_size", conv.slp.size())
        .size("steps", conv.stats.steps)
        .height("ig", ig.max_height())
        .height("slp", conv.slp.max_height());
    Ok(o)
}

pub fn eq(path: &PathBuf, x: &str, y: &str) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let (x, y) = (var(&slp, x)?, var(&slp, y)?);
    Ok(with_size(Outcome::answer(equal_eval(&slp, x, y)), &slp))
}

pub fn lcp(path: &PathBuf, x: &str, y: &str) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let (x, y) = (var(&slp, x)?, var(&slp, y)?);
    let n = longest_common_prefix(&slp, x, y).to_string();
    Ok(with_size(Outcome::new(n.clone(), json!(n)), &slp))
}

pub fn ask(path: &PathBuf, questions: &PathBuf) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let qs = load(questions, |t| parse_questions(&slp, t))?;
    let answers = answer_interval_questions(&slp, &qs)?;
    let mut text = String::new();
    for (q, a) in qs.iter().zip(&answers) {
        let (x, y) = (slp.display(q.x), slp.display(q.y));
        let verdict = if *a { "yes" } else { "no" };
        text.push_str(&format!("{x}[{},{}] = {y}[{},{}]: {verdict}\n", q.i, q.j, q.k, q.l));
    }
    let all = answers.iter().all(|&a| a);
    Ok(with_size(Outcome::new(text, json!(answers)).with_yes(all), &slp))
}

/// Names of `vars`, or every variable when empty.
fn roots(slp: &Slp, vars: &[String]) -> CliResult<Vec<(String, VarRef)>> {
    if vars.is_empty() {
        return Ok(slp.vars().map(|x| (slp.name(x).to_string(), x.pos())).collect());
    }
    vars.iter().map(|n| Ok((n.clone(), var(slp, n)?))).collect()
}

pub fn reduce(path: &PathBuf, vars: &[String]) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    slp.alphabet().require_group()?;
    let roots = roots(&slp, vars)?;
    let red = reduce_slp(&slp)?;
    let hats: Vec<VarRef> = roots.iter().map(|(_, x)| red.hat(*x)).collect();
    let (out, hats) = red.slp.prune(&hats);
    let names: Vec<String> = roots.iter().map(|(n, _)| n.clone()).collect();
    let bound: Vec<Option<VarRef>> = hats.into_iter().map(Some).collect();
    let text = format_bound_slp(&out, &names, &bound);
    let o = Outcome::new(text.clone(), json!({ "slp": text }))
        .size("input", slp.size())
        .size("output", out.size())
        .height("input", slp.max_height())
        .height("output", out.max_height());
    Ok(o)
}

pub fn cwp(path: &PathBuf, x: &str) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let x = var(&slp, x)?;
    Ok(with_size(Outcome::answer(compressed_word_problem(&slp, x)?), &slp))
}

fn names(word: &str) -> Vec<String> {
    word.split_whitespace().map(str::to_string).collect()
}

pub fn endo_slp(path: &PathBuf, word: &str, letter: &str) -> CliResult<Outcome> {
    let table = load(path, parse_endomorphisms)?;
    let (slp, root): (Slp, VarRef) = schleimer_slp(&table, &names(word), letter)?;
    let text = format_bound_slp(&slp, &["Root".to_string()], &[Some(root)]);
    let len = slp.len(root).to_string();
    let o = Outcome::new(text.clone(), json!({ "slp": text, "root": slp.display(root), "length": len }));
    Ok(with_size(o, &slp))
}

pub fn endo_eq(path: &PathBuf, left: &str, right: &str) -> CliResult<Outcome> {
    let table = load(path, parse_endomorphisms)?;
    Ok(Outcome::answer(endomorphism_word_problem::<Len>(&table, &names(left), &names(right))?))
}

pub fn prune(path: &PathBuf, vars: &[String]) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    let roots = roots(&slp, vars)?;
    let (out, _) = slp.prune(&roots.iter().map(|r| r.1).collect::<Vec<_>>());
    let text = format_slp(&out);
    let o = Outcome::new(text.clone(), json!({ "slp": text })).size("input", slp.size()).size("output", out.size());
    Ok(o)
}

pub fn stats(path: &PathBuf) -> CliResult<Outcome> {
    let slp = load_slp(path)?;
    if slp.num_vars() == 0 {
        return Err(CliError::Usage(format!("{}: the grammar has no rules", path.display())));
    }
    let mut vars: Vec<_> = slp.vars().collect();
    vars.sort_by_key(|&x| slp.name(x));
    let mut text = format!("vars {}\nsize {}\nheight {}\n", slp.num_vars(), slp.size(), slp.max_height());
    let (mut lengths, mut heights) = (Map::new(), Map::new());
    for x in vars {
        let (n, len, h) = (slp.name(x), slp.len(x.pos()), slp.height(x.pos()));
        text.push_str(&format!("{n} length {len} height {h}\n"));
        lengths.insert(n.to_string(), json!(len.to_string()));
        heights.insert(n.to_string(), json!(h));
    }
    // output size of free reduction relative to ‖S‖·h(S)
    let mut res = json!({ "vars": slp.num_vars(), "size": slp.size(), "height": slp.max_height(), "lengths": lengths });
    if slp.alphabet().is_group() {
        let red = reduce_slp(&slp)?;
        let ratio = red.slp.size() as f64 / (slp.size() as f64 * f64::from(slp.max_height().max(1)));
        text.push_str(&format!("reduction size ratio {ratio:.3}\n"));
        res["reduction_size_ratio"] = json!(ratio);
    }
    let mut o = with_size(Outcome::new(text, res), &slp);
    o.heights.extend(heights);
    Ok(o)
}
