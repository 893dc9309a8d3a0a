//! Browser bindings: representation counts, formula checks and pair
//! classification for the catalog orders or a pasted order file.

use quatlat::catalog;
use quatlat::enumerate::{count_representations, counts_up_to};
use quatlat::formulas::{formula_for, predict, FormulaError};
use quatlat::lattice::{parse_order_file, Order};
use quatlat::numbers::RingInteger;
use quatlat::perceptive::{is_perceptive_bruteforce, kind_of, quotient_shape, PerceptiveError};
use wasm_bindgen::prelude::*;

/// A catalog name, or the text of an order file.
pub fn resolve(spec: &str) -> Result<Order, String> {
    let spec = spec.trim();
    if spec.contains("basis:") {
        return parse_order_file(spec).map_err(|e| e.to_string());
    }
    catalog::order(spec).map_err(|e| e.to_string())
}

fn superorder(name: &str, g: &Order) -> Result<Order, String> {
    match catalog::entry(name.trim()) {
        Some(e) if e.maximal => Ok(g.clone()),
        Some(e) => catalog::order(e.superorder.unwrap_or(e.name)).map_err(|e| e.to_string()),
        None => Err("pasted orders need an explicit superorder".into()),
    }
}

fn alpha_of(o: &Order, s: &str) -> Result<RingInteger, String> {
    let a = RingInteger::parse(o.field(), s.trim()).map_err(|e| e.to_string())?;
    if !a.is_totally_positive() {
        return Err(format!("{a} is not totally positive"));
    }
    Ok(a)
}

pub fn catalog_listing() -> String {
    catalog::CATALOG.iter().map(|e| format!("{}\t{}\n", e.name, e.superorder.unwrap_or("-"))).collect()
}

/// One TSV row: α, enumerated count, formula name and prediction.
pub fn count_tsv(order: &str, against: &str, alpha: &str) -> Result<String, String> {
    let g = resolve(order)?;
    let h = if against.trim().is_empty() { superorder(order, &g)? } else { resolve(against)? };
    let a = alpha_of(&g, alpha)?;
    let n = count_representations(&g, &a).map_err(|e| e.to_string())?;
    let (name, pred) = match formula_for(&g, &h) {
        Ok(d) => (d.kind.to_string(), predict(&d, &a).map_err(|e| e.to_string())?.to_string()),
        Err(FormulaError::NoFormula(_)) => ("-".to_string(), "-".to_string()),
        Err(e) => return Err(e.to_string()),
    };
    Ok(format!("alpha\tcount\tformula\tpredicted\n{a}\t{n}\t{name}\t{pred}\n"))
}

/// Formula against enumeration for every totally positive α with tr(α) ≤ T.
pub fn verify_tsv(order: &str, against: &str, max_trace: i64) -> Result<String, String> {
    let g = resolve(order)?;
    let h = if against.trim().is_empty() { superorder(order, &g)? } else { resolve(against)? };
    let d = formula_for(&g, &h).map_err(|e| e.to_string())?;
    let mut out = String::from("alpha\tpredicted\tcounted\tverdict\n");
    for (a, n) in counts_up_to(&g, max_trace).map_err(|e| e.to_string())? {
        let p = predict(&d, &a).map_err(|e| e.to_string())?;
        let verdict = if p == n.into() { "OK" } else { "MISMATCH" };
        out.push_str(&format!("{a}\t{p}\t{n}\t{verdict}\n"));
    }
    Ok(out)
}

pub fn classify_tsv(order: &str, against: &str) -> Result<String, String> {
    let g = resolve(order)?;
    let h = if against.trim().is_empty() { superorder(order, &g)? } else { resolve(against)? };
    let kind = kind_of(&g, &h).map_err(|e| e.to_string())?;
    let shape = quotient_shape(&g, &h).map_err(|e| e.to_string())?;
    let perceptive = match is_perceptive_bruteforce(&g, &h) {
        Ok(b) => b.to_string(),
        Err(PerceptiveError::Capacity(n)) => format!("unknown ({n} cosets)"),
        Err(e) => return Err(e.to_string()),
    };
    Ok(format!("kind\tshape\tperceptive\n{kind}\t{shape}\t{perceptive}\n"))
}

#[wasm_bindgen]
pub fn catalog_names() -> String {
    catalog_listing()
}

#[wasm_bindgen]
pub fn count(order: &str, against: &str, alpha: &str) -> Result<String, JsValue> {
    count_tsv(order, against, alpha).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn verify(order: &str, against: &str, max_trace: i32) -> Result<String, JsValue> {
    verify_tsv(order, against, i64::from(max_trace)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classify(order: &str, against: &str) -> Result<String, JsValue> {
    classify_tsv(order, against).map_err(|e| JsValue::from_str(&e))
}
