#![allow(dead_code)]

use anticyclo_core::gzsum::{GZBase, GZInstance};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

pub fn base() -> Arc<GZBase> {
    static B: OnceLock<Arc<GZBase>> = OnceLock::new();
    B.get_or_init(|| Arc::new(GZBase::flagship().expect("flagship instance"))).clone()
}

pub fn inst(l: u64, n: u32) -> Arc<GZInstance> {
    static I: OnceLock<Mutex<BTreeMap<(u64, u32), Arc<GZInstance>>>> = OnceLock::new();
    let map = I.get_or_init(Default::default);
    if let Some(i) = map.lock().unwrap().get(&(l, n)) {
        return i.clone();
    }
    let i = Arc::new(GZInstance::new(base(), l, n, 10).expect("instance"));
    map.lock().unwrap().entry((l, n)).or_insert(i).clone()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare against the stored file, or rewrite it when `ANTICYCLO_BLESS` is set.
pub fn check_golden(name: &str, actual: &str) -> bool {
    let path = golden_path(name);
    if std::env::var_os("ANTICYCLO_BLESS").is_some() {
        std::fs::write(&path, actual).expect("write golden");
        return true;
    }
    match std::fs::read_to_string(&path) {
        Ok(expected) => expected == actual,
        Err(e) => panic!("missing golden file {}: {e}", path.display()),
    }
}

use anticyclo_core::gzsum::{main_theorem_report, trace_grid, trace_identity_check_with_m, TraceReport};

fn opt(v: Option<u64>) -> String {
    v.map_or("inf".to_string(), |x| x.to_string())
}

/// One line per `(χ₀, χ₁)` row of the main-theorem scan.
pub fn render_main_theorem(l: u64, n: u32) -> String {
    let rep = main_theorem_report(&inst(l, n)).expect("scan");
    let mut s = format!("# l={l} n={n} mu={} nu={}\n# chi0 chi1 k_exponent z_exponent min max exists_y\n", rep.mu, rep.nu);
    for r in &rep.rows {
        s += &format!(
            "{} {} {} {} {} {} {}\n",
            r.chi0,
            r.chi1,
            r.params.k_exponent,
            r.params.z_exponent,
            opt(r.min),
            opt(r.max),
            r.exists_y
        );
    }
    s
}

pub fn render_trace_rows(rows: &[TraceReport]) -> String {
    let mut s = String::from("# x chi chi0 chi1 degree m equal\n");
    for r in rows {
        s += &format!("{} {} {} {} {} {} {}\n", r.x, r.chi, r.chi0, r.chi1, r.degree, r.m, r.equal);
    }
    s
}

pub fn render_trace_grid(l: u64, n: u32) -> String {
    let rows = trace_grid(&inst(l, n)).expect("grid");
    format!("# l={l} n={n}\n{}", render_trace_rows(&rows))
}

/// The trace comparison at `l = 7`, `n = 4` with `m` forced to 2.
pub fn mismatch_rows() -> Vec<TraceReport> {
    let i = inst(7, 4);
    let chis: Vec<_> = i.characters.iter().filter(|c| i.is_primitive(c)).collect();
    use rayon::prelude::*;
    chis.par_iter()
        .flat_map(|c| (0..i.orbit.len()).into_par_iter().map(move |s| (s, *c)))
        .map(|(s, c)| trace_identity_check_with_m(&i, s, c, 2).expect("trace"))
        .collect()
}
