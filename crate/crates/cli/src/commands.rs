use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;

use aisemi::algebra::{parse_algebras, registry, registry_names, serialize_algebra, AlgebraError, FormatError};
use aisemi::derivation::{
    check_derivation, format_derivation, parse_derivation, search_derivation, SearchBounds, SearchOutcome,
};
use aisemi::enumeration::{census_document, classify_additive_type, enumerate_ai_semirings_with, screen_family, EnumerationOptions};
use aisemi::family::{in_w_with, MembershipOptions};
use aisemi::satisfaction::{decide_s2, decide_s53, decide_s7, BruteForce, Counterexample, SatisfactionVerdict};
use aisemi::structure::{check_subdirect, find_isomorphism, parse_label_set, quotient, subalgebra, Partition};
use aisemi::terms::{parse_identity, parse_inequality, Identity};
use aisemi::{natural_order, FiniteAiSemiring};
use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::load::load_algebra;

/// Result of a command: its exit status and both renderings.
pub struct Output {
    pub ok: bool,
    pub human: String,
    pub json: Value,
}

impl Output {
    fn new(ok: bool, human: String, json: Value) -> Self {
        Output { ok, human, json }
    }
}

#[derive(Serialize)]
struct AlgebraJson<'a> {
    name: &'a str,
    elements: &'a [String],
    add: Vec<Vec<&'a str>>,
    mul: Vec<Vec<&'a str>>,
}

pub fn algebra_json(s: &FiniteAiSemiring) -> Value {
    let table = |f: fn(&FiniteAiSemiring, usize, usize) -> usize| {
        (0..s.order())
            .map(|a| (0..s.order()).map(|b| s.label(f(s, a, b))).collect())
            .collect()
    };
    serde_json::to_value(AlgebraJson {
        name: s.name(),
        elements: s.labels(),
        add: table(FiniteAiSemiring::add),
        mul: table(FiniteAiSemiring::mul),
    })
    .expect("serializable")
}

pub fn validate(path: &str) -> Result<Output> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    match parse_algebras(&text) {
        Ok(all) if all.is_empty() => bail!("{path}: no algebra found"),
        Ok(all) => {
            let mut human = String::new();
            for s in &all {
                let _ = writeln!(human, "{}: valid ai-semiring of order {}", s.name(), s.order());
            }
            let names: Vec<&str> = all.iter().map(FiniteAiSemiring::name).collect();
            Ok(Output::new(true, human, json!({ "valid": true, "algebras": names })))
        }
        Err(FormatError::Invalid(AlgebraError::Axioms(report))) => {
            let mut human = String::from("axioms violated:\n");
            for v in &report.violations {
                let _ = writeln!(human, "  {} fails at {:?}", v.axiom, v.witness);
            }
            if report.truncated {
                human.push_str("  (further violations omitted)\n");
            }
            Ok(Output::new(
                false,
                human,
                json!({ "valid": false, "violations": report.violations, "truncated": report.truncated }),
            ))
        }
        Err(e) => Err(e).with_context(|| format!("parsing {path}")),
    }
}

fn assignment_text(s: &FiniteAiSemiring, c: &Counterexample) -> BTreeMap<String, String> {
    c.assignment
        .iter()
        .map(|(x, &v)| (x.to_string(), s.label(v).to_string()))
        .collect()
}

fn verdict_output(s: &FiniteAiSemiring, statement: String, v: &SatisfactionVerdict) -> Output {
    let mut human = format!("{}: {statement} in {}\n", if v.holds { "holds" } else { "fails" }, s.name());
    let mut j = json!({ "algebra": s.name(), "statement": statement, "holds": v.holds });
    if let Some(c) = &v.counterexample {
        let a = assignment_text(s, c);
        let shown: Vec<String> = a.iter().map(|(x, v)| format!("{x}={v}")).collect();
        let _ = writeln!(
            human,
            "counterexample: {} (left {}, right {})",
            shown.join(", "),
            s.label(c.lhs_value),
            s.label(c.rhs_value)
        );
        j["counterexample"] = json!({
            "assignment": a,
            "left": s.label(c.lhs_value),
            "right": s.label(c.rhs_value),
        });
    }
    Output::new(v.holds, human, j)
}

pub fn holds(algebra: &str, ineq: Option<&str>, id: Option<&str>, allow_large: bool) -> Result<Output> {
    let s = load_algebra(algebra)?;
    let bf = BruteForce { allow_large, ..BruteForce::default() };
    match (ineq, id) {
        (Some(text), None) => {
            let i = parse_inequality(text).context("parsing inequality")?;
            let v = bf.inequality(&s, &i.lhs, &i.rhs)?;
            Ok(verdict_output(&s, i.to_string(), &v))
        }
        (None, Some(text)) => {
            let i = parse_identity(text).context("parsing identity")?;
            let v = bf.identity(&s, &i.lhs, &i.rhs)?;
            Ok(verdict_output(&s, i.to_string(), &v))
        }
        _ => bail!("give exactly one of --ineq and --id"),
    }
}

pub fn decide(which: &str, ineq: &str, oracle: bool) -> Result<Output> {
    let i = parse_inequality(ineq).context("parsing inequality")?;
    let (name, decider): (&str, fn(&_, &_) -> bool) = match which {
        "s2" => ("S2", decide_s2),
        "s7" => ("S7", decide_s7),
        "s53" => ("S53", decide_s53),
        other => bail!("unknown decider {other:?}"),
    };
    let verdict = decider(&i.lhs, &i.rhs);
    let mut human = format!("{}: {i} in {name} (syntactic)\n", if verdict { "holds" } else { "fails" });
    let mut j = json!({ "algebra": name, "statement": i.to_string(), "holds": verdict });
    let mut ok = verdict;
    if oracle {
        let s = registry(name)?;
        let truth = BruteForce::default().inequality(&s, &i.lhs, &i.rhs)?.holds;
        let agree = truth == verdict;
        let _ = writeln!(
            human,
            "oracle: brute force says {}; {}",
            if truth { "holds" } else { "fails" },
            if agree { "agrees" } else { "DISAGREES" }
        );
        j["oracle"] = json!({ "holds": truth, "agrees": agree });
        ok &= agree;
    }
    Ok(Output::new(ok, human, j))
}

pub fn family(algebra: &str, n_max: usize, allow_large: bool) -> Result<Output> {
    let s = load_algebra(algebra)?;
    let opts = MembershipOptions {
        allow_large,
        ..Default::default()
    };
    let report = in_w_with(&s, n_max, opts)?;
    let mut human = String::new();
    let mut rows = Vec::new();
    for (n, v) in &report.verdicts {
        let _ = write!(human, "n = {n}: {}", if v.holds { "holds" } else { "fails" });
        let mut row = json!({ "n": n, "holds": v.holds });
        if let Some(c) = &v.counterexample {
            let a = assignment_text(&s, c);
            let shown: Vec<String> = a.iter().map(|(x, v)| format!("{x}={v}")).collect();
            let _ = write!(human, " at {}", shown.join(", "));
            row["counterexample"] = json!(a);
        }
        human.push('\n');
        rows.push(row);
    }
    let all = report.all_hold();
    let _ = writeln!(
        human,
        "{} {} the family inequalities for n <= {n_max}",
        s.name(),
        if all { "satisfies" } else { "does not satisfy" }
    );
    Ok(Output::new(all, human, json!({ "algebra": s.name(), "n_max": n_max, "all_hold": all, "verdicts": rows })))
}

pub fn quotient_cmd(algebra: &str, blocks: &str) -> Result<Output> {
    let s = load_algebra(algebra)?;
    let p = Partition::parse_labels(&s, blocks)?;
    match quotient(&s, &p) {
        Ok(q) => Ok(Output::new(
            true,
            serialize_algebra(&q),
            json!({ "congruence": true, "quotient": algebra_json(&q) }),
        )),
        Err(aisemi::structure::StructureError::NotCongruence(w)) => {
            let op = w.op.to_string();
            let (a, b, c) = (s.label(w.a), s.label(w.b), s.label(w.c));
            let human = if w.c_on_left {
                format!("not a congruence: {a} ~ {b} but {c} {op} {a} and {c} {op} {b} are in different blocks\n")
            } else {
                format!("not a congruence: {a} ~ {b} but {a} {op} {c} and {b} {op} {c} are in different blocks\n")
            };
            Ok(Output::new(
                false,
                human,
                json!({ "congruence": false, "witness": { "a": a, "b": b, "c": c, "op": op, "c_on_left": w.c_on_left } }),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn subalgebra_cmd(algebra: &str, subset: &str) -> Result<Output> {
    let s = load_algebra(algebra)?;
    let set = parse_label_set(&s, subset)?;
    match subalgebra(&s, &set) {
        Ok(sub) => Ok(Output::new(
            true,
            serialize_algebra(&sub),
            json!({ "closed": true, "subalgebra": algebra_json(&sub) }),
        )),
        Err(aisemi::structure::StructureError::NotClosed { a, b, op, result }) => {
            let (a, b, r) = (s.label(a), s.label(b), s.label(result));
            Ok(Output::new(
                false,
                format!("not closed: {a} {op} {b} = {r} lies outside the subset\n"),
                json!({ "closed": false, "witness": { "a": a, "b": b, "op": op.to_string(), "result": r } }),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn iso_text(a: &FiniteAiSemiring, b: &FiniteAiSemiring, map: &[usize]) -> BTreeMap<String, String> {
    map.iter()
        .enumerate()
        .map(|(x, &y)| (a.label(x).to_string(), b.label(y).to_string()))
        .collect()
}

pub fn iso(a: &str, b: &str) -> Result<Output> {
    let (sa, sb) = (load_algebra(a)?, load_algebra(b)?);
    match find_isomorphism(&sa, &sb) {
        Some(map) => {
            let m = iso_text(&sa, &sb, &map);
            let shown: Vec<String> = m.iter().map(|(x, y)| format!("{x}->{y}")).collect();
            Ok(Output::new(
                true,
                format!("isomorphic: {} ~ {} via {}\n", sa.name(), sb.name(), shown.join(", ")),
                json!({ "isomorphic": true, "map": m }),
            ))
        }
        None => Ok(Output::new(
            false,
            format!("not isomorphic: {} and {}\n", sa.name(), sb.name()),
            json!({ "isomorphic": false }),
        )),
    }
}

/// Registry algebras isomorphic to `s`.
fn registry_matches(s: &FiniteAiSemiring) -> Vec<&'static str> {
    registry_names()
        .iter()
        .copied()
        .filter(|n| find_isomorphism(s, &registry(n).expect("registry")).is_some())
        .collect()
}

pub fn subdirect(algebra: &str, theta1: &str, theta2: &str) -> Result<Output> {
    let s = load_algebra(algebra)?;
    let p1 = Partition::parse_labels(&s, theta1)?;
    let p2 = Partition::parse_labels(&s, theta2)?;
    let rep = check_subdirect(&s, &p1, &p2)?;
    let ok = rep.is_subdirect_embedding();
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let m1 = registry_matches(&rep.factor1);
    let m2 = registry_matches(&rep.factor2);
    let mut human = String::new();
    let _ = writeln!(human, "injective: {}", yes_no(rep.injective));
    let _ = writeln!(human, "meet of congruences is trivial: {}", yes_no(rep.meet_is_discrete));
    let _ = writeln!(human, "first projection surjective: {}", yes_no(rep.first_projection_surjective));
    let _ = writeln!(human, "second projection surjective: {}", yes_no(rep.second_projection_surjective));
    let _ = writeln!(human, "factor 1: order {}, isomorphic to {}", rep.factor1.order(), list_or_none(&m1));
    let _ = writeln!(human, "factor 2: order {}, isomorphic to {}", rep.factor2.order(), list_or_none(&m2));
    let _ = writeln!(
        human,
        "{} {} a subdirect product of its two factors",
        s.name(),
        if ok { "is" } else { "is not" }
    );
    Ok(Output::new(
        ok,
        human,
        json!({
            "injective": rep.injective,
            "meet_is_discrete": rep.meet_is_discrete,
            "first_projection_surjective": rep.first_projection_surjective,
            "second_projection_surjective": rep.second_projection_surjective,
            "factor1": { "algebra": algebra_json(&rep.factor1), "registry_matches": m1 },
            "factor2": { "algebra": algebra_json(&rep.factor2), "registry_matches": m2 },
            "subdirect": ok,
        }),
    ))
}

fn list_or_none(names: &[&str]) -> String {
    if names.is_empty() {
        "no registry algebra".into()
    } else {
        names.join(", ")
    }
}

pub const DEDUP_CAP_VAR: &str = "AISEMI_DEDUP_CAP";

pub fn enumerate(order: usize, classify: bool, screen: Option<usize>, output: Option<&str>) -> Result<Output> {
    let dedup_cap = match std::env::var(DEDUP_CAP_VAR) {
        Ok(v) => Some(v.parse().with_context(|| format!("{DEDUP_CAP_VAR}={v:?} is not a count"))?),
        Err(_) => None,
    };
    let list = enumerate_ai_semirings_with(order, EnumerationOptions { dedup_cap })?;
    let mut human = format!("order {order}: {} ai-semirings up to isomorphism\n", list.len());
    let mut j = json!({ "order": order, "count": list.len() });
    if classify {
        let types = classify_additive_type(&list);
        let _ = writeln!(human, "additive types: {}", types.len());
        let mut rows = Vec::new();
        for t in &types {
            let key: String = t.key.iter().map(|x| (x + 1).to_string()).collect();
            let _ = writeln!(
                human,
                "  join {key}: minimals {}, coatoms {}, algebras {}",
                t.minimals, t.coatoms, t.count
            );
            rows.push(json!({ "join": key, "minimals": t.minimals, "coatoms": t.coatoms, "count": t.count }));
        }
        j["types"] = json!(rows);
    }
    if let Some(n_max) = screen {
        let passed = screen_family(&list, n_max)?;
        let names: Vec<&str> = passed.iter().map(|&i| list[i].name()).collect();
        let _ = writeln!(human, "family screen n <= {n_max}: {} of {} pass", passed.len(), list.len());
        for name in &names {
            let _ = writeln!(human, "  {name}");
        }
        j["screen"] = json!({ "n_max": n_max, "passed": names });
    }
    if let Some(path) = output {
        fs::write(path, census_document(&list)).with_context(|| format!("writing {path}"))?;
        let _ = writeln!(human, "census written to {path}");
        j["output"] = json!(path);
    }
    Ok(Output::new(true, human, j))
}

pub fn derive_check(path: &str) -> Result<Output> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let f = parse_derivation(&text).with_context(|| format!("parsing {path}"))?;
    let steps = f.derivation.steps.len();
    match check_derivation(&f.derivation, &f.claim) {
        Ok(()) => Ok(Output::new(
            true,
            format!("valid: {} derived in {steps} steps\n", f.claim),
            json!({ "valid": true, "claim": f.claim.to_string(), "steps": steps }),
        )),
        Err(e) => Ok(Output::new(
            false,
            format!("invalid: {e}\n"),
            json!({ "valid": false, "claim": f.claim.to_string(), "failed_step": e.step_index(), "reason": e.to_string() }),
        )),
    }
}

pub fn derive_search(sigma: &[String], claim: &str, bounds: SearchBounds, output: Option<&str>) -> Result<Output> {
    let sigma: Vec<Identity> = sigma
        .iter()
        .map(|s| parse_identity(s).with_context(|| format!("parsing sigma identity {s:?}")))
        .collect::<Result<_>>()?;
    let claim = parse_identity(claim).context("parsing claim")?;
    match search_derivation(&sigma, &claim, bounds)? {
        SearchOutcome::Found(d) => {
            check_derivation(&d, &claim).context("search produced an invalid derivation")?;
            let text = format_derivation(&d, &claim);
            if let Some(path) = output {
                fs::write(path, &text).with_context(|| format!("writing {path}"))?;
            }
            Ok(Output::new(
                true,
                text.clone(),
                json!({ "found": true, "steps": d.steps.len(), "derivation": text }),
            ))
        }
        SearchOutcome::Exhausted(reason) => Ok(Output::new(
            false,
            format!("exhausted: {reason} (this does not show the claim is underivable)\n"),
            json!({ "found": false, "reason": reason.to_string() }),
        )),
    }
}

pub fn show(name: Option<&str>) -> Result<Output> {
    match name {
        Some(n) => {
            let s = registry(n)?;
            let p = natural_order(&s);
            let labels = |set: &std::collections::BTreeSet<usize>| set.iter().map(|&a| s.label(a)).collect::<Vec<_>>();
            Ok(Output::new(
                true,
                serialize_algebra(&s),
                json!({
                    "algebra": algebra_json(&s),
                    "top": s.label(p.top),
                    "minimals": labels(&p.minimals),
                    "coatoms": labels(&p.coatoms),
                    "commutative": s.is_commutative_mult(),
                }),
            ))
        }
        None => {
            let names = registry_names();
            Ok(Output::new(true, format!("{}\n", names.join("\n")), json!({ "registry": names })))
        }
    }
}
