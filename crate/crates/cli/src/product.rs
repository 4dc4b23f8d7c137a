//! Verbs on free products of abelian groups.

use std::path::PathBuf;

use serde_json::json;
use slpwq::equations::Solution;
use slpwq::product::{
    compress_solution_alphabetic, compress_solution_parikh, parikh_of_slp, parikh_of_word, triangulate_and_split,
    verify_certificate, Certificate, ExtendedParikhImage, ProductSpec, ProductSystem,
};
use slpwq::text::{
    bindings_for, format_bound_slp, format_constraint, format_parikh, format_solution, format_system,
    parse_bound_slp, parse_product_spec, parse_product_system, parse_product_system_over, parse_solution,
};
use slpwq::{Len, Slp};

use crate::grammar::var;
use crate::{load, read, CliError, CliResult, Outcome};

fn load_pair(system: &PathBuf, solution: &PathBuf) -> CliResult<(ProductSystem, Solution)> {
    let sys = load(system, parse_product_system)?;
    let sigma = load(solution, |t| parse_solution(&sys.equations, t))?;
    Ok((sys, sigma))
}

fn image_json(spec: &ProductSpec, p: &ExtendedParikhImage) -> serde_json::Value {
    let name = |a: Option<usize>| a.map(|a| spec.factors[a].name.clone());
    json!({
        "counts": p.counts,
        "abelian": p.abelian,
        "first": name(p.first),
        "last": name(p.last),
    })
}

pub fn parikh(spec: &PathBuf, word: &str, slp: Option<&PathBuf>) -> CliResult<Outcome> {
    let sys = load(spec, parse_product_system)?;
    let spec = &sys.spec;
    let p = match slp {
        Some(path) => {
            let g: Slp = load(path, slpwq::text::parse_slp)?;
            if g.alphabet() != &spec.alphabet {
                return Err(CliError::Usage(format!("{}: alphabet differs from the spec", path.display())));
            }
            parikh_of_slp(spec, &g, var(&g, word)?)?
        }
        None => parikh_of_word(spec, &spec.alphabet.parse_word(word)?),
    };
    Ok(Outcome::new(format_parikh(spec, &p), image_json(spec, &p)))
}

pub fn reorder(sequence: &[usize]) -> CliResult<Outcome> {
    let (out, shape) = slpwq::product::reorder(sequence)?;
    let mut parts: Vec<String> = out.runs.iter().map(|(x, y, e)| format!("({x} {y})^{e}")).collect();
    parts.extend(out.tail.map(|t| t.to_string()));
    let text = format!("{}\nshape {shape:?}\n", parts.join(" "));
    let res = json!({ "runs": out.runs, "tail": out.tail, "shape": format!("{shape:?}") });
    Ok(Outcome::new(text, res).size("runs", out.runs.len()).size("length", out.len()))
}

pub fn split(system: &PathBuf, solution: &PathBuf) -> CliResult<Outcome> {
    let (sys, sigma) = load_pair(system, solution)?;
    let s = triangulate_and_split(&sys, &sigma)?;
    let mut text = format_system(&s.strings);
    text.push_str(&format_solution(&s.strings, &s.sigma));
    for (x, c) in &s.constraints {
        text.push_str(&format_constraint(&sys.spec, s.strings.name(*x), c));
        text.push('\n');
    }
    let res = json!({ "text": text });
    let o = Outcome::new(text.clone(), res)
        .size("equations", s.strings.equations.len())
        .size("denotational_length", s.strings.denotational_length())
        .size("variables", s.strings.variables.len());
    Ok(o)
}

pub fn compress(system: &PathBuf, solution: &PathBuf, parikh: bool) -> CliResult<Outcome> {
    let (sys, sigma) = load_pair(system, solution)?;
    let (cert, stats) = if parikh {
        compress_solution_parikh::<Len>(&sys, &sigma)?
    } else {
        compress_solution_alphabetic::<Len>(&sys, &sigma)?
    };
    let text = format_bound_slp(&cert.slp, &sys.equations.variables, &cert.bindings);
    let mut o = Outcome::new(text.clone(), json!({ "certificate": text }))
        .size("string_equations", stats.string_equations)
        .size("denotational_length", stats.denotational_length)
        .size("generic_length", stats.generic_length)
        .size("solution_length", stats.solution_length)
        .size("ig", stats.ig_size)
        .size("compressed", stats.compressed_size)
        .size("certificate", stats.certificate_size)
        .height("certificate", cert.slp.max_height());
    o.class_count = Some(stats.classes);
    Ok(o)
}

/// `[SPEC] SYSTEM CERT`.
pub fn verify_cert(files: &[PathBuf]) -> CliResult<Outcome> {
    let (sys, cert_path) = match files {
        [system, cert] => (load(system, parse_product_system)?, cert),
        [spec, system, cert] => {
            let spec = load(spec, parse_product_spec)?;
            let (name, text) = read(system)?;
            let sys = parse_product_system_over(spec, &text).map_err(|source| CliError::Input { path: name, source })?;
            (sys, cert)
        }
        _ => return Err(CliError::Usage("expected [SPEC] SYSTEM CERT".into())),
    };
    let (slp, binds): (Slp, _) = load(cert_path, parse_bound_slp)?;
    if slp.alphabet() != &sys.spec.alphabet {
        return Err(CliError::Usage(format!("{}: alphabet differs from the spec", cert_path.display())));
    }
    let bindings = bindings_for(&slp, &sys.equations.variables, &binds);
    let cert = Certificate { slp, bindings };
    let ok = verify_certificate(&sys, &cert)?;
    Ok(Outcome::answer(ok).size("certificate", cert.slp.size()))
}
