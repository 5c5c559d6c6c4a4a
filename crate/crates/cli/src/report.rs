//! JSON rendering of library results. Keys are sorted, so equal inputs give equal bytes.

use killing_web::ckt::{CktVerdict, TsnReport};
use killing_web::frames::FrameResult;
use killing_web::mat::Mat4;
use killing_web::scalar::{format_float, format_rational};
use killing_web::separation::{format_linear_form, CktSubfamily, CompatibleSpace, SeparationReport, SubfamilySource};
use killing_web::symmetry::SymmetrySignature;
use killing_web::tensor::act::slot_label;
use killing_web::tensor::{Act, KillingVectorParams};
use killing_web::Rational;
use serde_json::{json, Map, Value};

pub fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn act_exact(c: &Act<Rational>) -> Value {
    let mut m = Map::new();
    for (s, v) in c.slots().iter().enumerate() {
        if !num::Zero::is_zero(v) {
            m.insert(format!("C{}", slot_label(s)), rat(v));
        }
    }
    Value::Object(m)
}

pub fn act_float(c: &Act<f64>) -> Value {
    let scale = c.frobenius().max(1e-300);
    let mut m = Map::new();
    for (s, v) in c.slots().iter().enumerate() {
        if v.abs() > 1e-14 * scale {
            m.insert(format!("C{}", slot_label(s)), json!(v));
        }
    }
    Value::Object(m)
}

pub fn mat_f64(m: &Mat4<f64>) -> Value {
    json!(m.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

pub fn mat_exact(m: &Mat4<Rational>) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(rat).collect())).collect())
}

pub fn kv_label_exact(kv: &KillingVectorParams<Rational>) -> String {
    kv.label(format_rational)
}

pub fn kv_label_float(kv: &KillingVectorParams<f64>) -> String {
    kv.label(|v: &f64| format_float(*v))
}

pub fn signature_exact(sig: &SymmetrySignature<Rational>) -> Value {
    json!({
        "rotations": sig.n_rotations,
        "translations": sig.n_translations,
        "generators": sig.generators.iter().map(|g| json!({
            "kind": g.kind,
            "vector": kv_label_exact(&g.kv),
            "casimir_alpha": g.casimir_alpha.as_ref().map(rat),
        })).collect::<Vec<_>>(),
    })
}

pub fn signature_float(sig: &SymmetrySignature<f64>) -> Value {
    json!({
        "rotations": sig.n_rotations,
        "translations": sig.n_translations,
        "generators": sig.generators.iter().map(|g| json!({
            "kind": g.kind,
            "vector": kv_label_float(&g.kv),
            "casimir_alpha": g.casimir_alpha,
        })).collect::<Vec<_>>(),
    })
}

pub fn tsn(t: &TsnReport) -> Value {
    json!({ "tsn1": t.tsn1, "tsn5": t.tsn5, "tsn6": t.tsn6, "h": t.h })
}

pub fn verdict(v: &CktVerdict) -> Value {
    let min_gap = v.eigen_report.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    json!({
        "is_ckt": v.is_ckt,
        "exact": v.exact,
        "haantjes_max": v.haantjes_max,
        "haantjes_witness": v.haantjes_witness,
        "degenerate": v.degenerate,
        "degenerate_samples": v.degenerate_samples.len(),
        "samples": v.eigen_report.len(),
        "min_eigenvalue_gap": min_gap.is_finite().then_some(min_gap),
        "tsn": v.tsn_report.as_ref().map(tsn),
    })
}

pub fn frame(fr: &FrameResult) -> Value {
    let named = |v: &[(String, f64)]| Value::Object(v.iter().map(|(k, x)| (k.clone(), json!(x))).collect());
    json!({
        "web": fr.web.name(),
        "category": fr.web.category().to_string(),
        "frame": mat_f64(fr.frame.matrix()),
        "exact_frame": fr.exact_frame.as_ref().map(|ef| json!({
            "eigenvalues": ef.eigenvalues.iter().map(rat).collect::<Vec<_>>(),
            "directions": ef.directions.iter().map(|d| d.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "norms_squared": ef.norms_squared().iter().map(rat).collect::<Vec<_>>(),
        })),
        "params": fr.params,
        "params_exact": fr.params_exact.as_ref().map(|p| p.iter().map(rat).collect::<Vec<_>>()),
        "casimir": fr.casimir,
        "casimir_exact": fr.casimir_exact.as_ref().map(rat),
        "essential": named(&fr.essential),
        "essential_exact": fr.essential_exact.as_ref().map(|v| Value::Object(v.iter().map(|(k, x)| (k.clone(), rat(x))).collect())),
        "residual": fr.residual,
        "ambiguous": fr.ambiguous.iter().map(|w| w.name()).collect::<Vec<_>>(),
        "out_of_range": fr.out_of_range,
        "swept": fr.swept,
    })
}

pub fn space(s: &CompatibleSpace) -> Value {
    let basis: Vec<Value> = match &s.exact_basis {
        Some(b) => b.iter().map(act_exact).collect(),
        None => s.basis.iter().map(act_float).collect(),
    };
    json!({
        "dimension": s.dimension,
        "exact": s.exact,
        "samples": s.samples,
        "sample_residual": s.sample_residual,
        "basis": basis,
    })
}

fn source(s: &SubfamilySource) -> String {
    match s {
        SubfamilySource::Generic => "generic".into(),
        SubfamilySource::OrbitSearch(w) => format!("orbit-search:{}", w.name()),
        SubfamilySource::Relations => "relations".into(),
    }
}

pub fn subfamily(f: &CktSubfamily) -> Value {
    let relations: Vec<String> = f
        .relations
        .iter()
        .map(|r| {
            let rhs: Vec<String> =
                r.terms.iter().map(|(p, c)| if c == "1" { p.clone() } else { format!("{c}*{p}") }).collect();
            format!("{} = {}", r.slot, if rhs.is_empty() { "0".into() } else { rhs.join(" + ").replace("+ -", "- ") })
        })
        .collect();
    json!({
        "source": source(&f.source),
        "parameters": f.parameters,
        "relations": relations,
        "witness": match &f.exact_witness { Some(w) => act_exact(w), None => act_float(&f.witness) },
        "verdict": verdict(&f.verdict),
        "orbit_residual": f.orbit_residual,
    })
}

pub fn separation(r: &SeparationReport) -> Value {
    json!({
        "status": r.status,
        "message": r.message,
        "potential": r.potential,
        "compatible_space": r.compatible_space.as_ref().map(space),
        "subfamily": r.subfamily.as_ref().map(subfamily),
        "signature": r.signature.as_ref().map(|s| json!({
            "rotations": s.rotations,
            "translations": s.translations,
            "generators": s.generators,
        })),
        "category": r.category.map(|c| c.to_string()),
        "ricci_symbolic": r.ricci_symbolic.as_ref().map(|m| m.iter().map(|row| row.iter().map(format_linear_form).collect::<Vec<_>>()).collect::<Vec<_>>()),
        "ricci_witness": r.ricci_witness.as_ref().map(mat_f64),
        "frame": r.frame.as_ref().map(frame),
        "canonical_ricci_symbolic": r.canonical_ricci_symbolic.as_ref().map(|d| d.iter().map(format_linear_form).collect::<Vec<_>>()),
        "coordinates": r.coordinates.as_ref().map(|c| json!({
            "web": c.web.name(),
            "names": c.names(),
            "canonical": c.canonical_terms(),
            "x": c.expressions(),
        })),
        "first_integral": r.first_integral,
    })
}
