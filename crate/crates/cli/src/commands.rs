use crate::cache::{digest, Cache, SCHEMA_VERSION};
use crate::config::{Format, InstanceConfig};
use anticyclo_core::brandt::{
    commutes, hypothesis_checks, is_weighted_self_adjoint, row_sums, satisfies_square_recursion, EllipticCurve,
    HypothesisReport, ThetaTable,
};
use anticyclo_core::gross::{cm_points, distribution_survey, transitivity_report};
use anticyclo_core::gzsum::{
    main_theorem_report, mu_nu_experiment, trace_grid, valuation_table, GZBase, GZInstance, TraceReport,
};
use anticyclo_core::numerics::arith::primes_up_to;
use anticyclo_core::quat::mass_check;
use anticyclo_core::ringclass::{class_group, QuadraticOrder, TowerSubgroups};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const COMMANDS: [&str; 11] = [
    "validate",
    "classgroup",
    "tower",
    "brandt",
    "eigen",
    "mu-nu",
    "cmpoints",
    "gzscan",
    "trace-check",
    "survey",
    "table",
];

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Hypothesis(Value),
    Core(anticyclo_core::Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Hypothesis(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "{s}"),
            CliError::Hypothesis(v) => write!(f, "hypothesis check failed: {v}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<anticyclo_core::Error> for CliError {
    fn from(e: anticyclo_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn to_value(x: impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

/// Lazily built instance data shared by the subcommands.
struct Session<'a> {
    cfg: &'a InstanceConfig,
    base: Option<Arc<GZBase>>,
    insts: BTreeMap<(u64, u32), Arc<GZInstance>>,
}

impl<'a> Session<'a> {
    fn new(cfg: &'a InstanceConfig) -> Self {
        Session {
            cfg,
            base: None,
            insts: BTreeMap::new(),
        }
    }

    fn curve(&self) -> EllipticCurve {
        EllipticCurve::new(self.cfg.curve, self.cfg.conductor)
    }

    fn base(&mut self) -> Result<Arc<GZBase>> {
        if self.base.is_none() {
            self.base = Some(Arc::new(GZBase::new(self.curve(), self.cfg.d_k, self.cfg.p)?));
        }
        Ok(self.base.clone().expect("just built"))
    }

    fn inst(&mut self, l: u64, n: u32) -> Result<Arc<GZInstance>> {
        if let Some(i) = self.insts.get(&(l, n)) {
            return Ok(i.clone());
        }
        let i = Arc::new(GZInstance::new(self.base()?, l, n, self.cfg.precision)?);
        self.insts.insert((l, n), i.clone());
        Ok(i)
    }

    fn hypotheses(&self) -> Result<Vec<(u64, HypothesisReport)>> {
        self.cfg
            .l
            .iter()
            .map(|&l| Ok((l, hypothesis_checks(&self.curve(), self.cfg.d_k, self.cfg.p, l, self.cfg.mu_search_bound)?)))
            .collect()
    }

    fn levels(&self) -> std::ops::RangeInclusive<u32> {
        1..=self.cfg.n_max
    }
}

fn validate(s: &Session) -> Result<Value> {
    let reports = s.hypotheses()?;
    let all_pass = reports.iter().all(|(_, r)| r.all_pass());
    let rows: Vec<Value> = reports
        .iter()
        .map(|(l, r)| json!({"l": l, "all_pass": r.all_pass(), "report": r}))
        .collect();
    Ok(json!({"all_pass": all_pass, "per_l": rows}))
}

fn classgroup(s: &Session) -> Result<Value> {
    let mut out = Vec::new();
    for n in 0..=s.cfg.n_max {
        let order = QuadraticOrder::new(s.cfg.d_k, s.cfg.p.pow(n))?;
        out.push(json!({"n": n, "group": class_group(&order)?.summary()}));
    }
    Ok(Value::Array(out))
}

fn tower(s: &Session) -> Result<Value> {
    let mut out = Vec::new();
    for n in s.levels() {
        let (t, subs) = TowerSubgroups::for_level(s.cfg.d_k, s.cfg.p, n)?;
        out.push(json!({
            "n": n,
            "order": t.order(n),
            "invariants": t.level(n).invariants(),
            "g0": subs.g0,
            "g1": subs.g1,
            "complement": subs.complement,
            "h_order": subs.h_order,
            "coset_reps_g0_g1": TowerSubgroups::coset_reps(t.level(n), &subs.g0, &subs.g1.subgroup),
        }));
    }
    Ok(Value::Array(out))
}

fn brandt(s: &mut Session) -> Result<Value> {
    let base = s.base()?;
    let classes = &base.cm.classes;
    let table = ThetaTable::new(classes, 49)?;
    let primes: Vec<u64> = primes_up_to(13)
        .into_iter()
        .filter(|q| s.cfg.conductor % q != 0)
        .collect();
    let mats = primes.iter().map(|&q| table.brandt(q)).collect::<anticyclo_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for b in &mats {
        let matrix: Vec<Vec<String>> = (0..b.matrix.rows())
            .map(|r| (0..b.matrix.cols()).map(|c| b.matrix[(r, c)].to_string()).collect())
            .collect();
        let square = if b.n * b.n <= table.bound() {
            Some(satisfies_square_recursion(b, &table.brandt(b.n * b.n)?))
        } else {
            None
        };
        rows.push(json!({
            "q": b.n,
            "matrix": matrix,
            "row_sums": row_sums(b).iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "self_adjoint": is_weighted_self_adjoint(b, classes.weights()),
            "square_recursion": square,
        }));
    }
    let commute = mats.iter().all(|a| mats.iter().all(|b| commutes(a, b)));
    Ok(json!({
        "classes": classes.len(),
        "weights": classes.weights(),
        "mass_check": mass_check(classes).to_string(),
        "commute": commute,
        "matrices": rows,
    }))
}

fn eigen(s: &mut Session) -> Result<Value> {
    let base = s.base()?;
    let curve = s.curve();
    let mut agree = true;
    let mut rows = Vec::new();
    for (&q, &a) in &base.theta.eigenvalues {
        let count = curve.aq_pointcount(q)?;
        agree &= count == a;
        rows.push(json!({"q": q, "a_q": a, "pointcount": count}));
    }
    Ok(json!({
        "values": base.theta.values.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "agrees_with_curve": agree,
        "eigenvalues": rows,
    }))
}

fn mu_nu(s: &mut Session) -> Result<Value> {
    let mut out = Vec::new();
    for l in s.cfg.l.clone() {
        let insts = s.levels().map(|n| s.inst(l, n)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&GZInstance> = insts.iter().map(|i| i.as_ref()).collect();
        out.push(to_value(mu_nu_experiment(&refs)?)?);
    }
    Ok(Value::Array(out))
}

fn cmpoints(s: &mut Session) -> Result<Value> {
    let base = s.base()?;
    let mut out = Vec::new();
    for n in s.levels() {
        let g = class_group(&QuadraticOrder::new(s.cfg.d_k, s.cfg.p.pow(n))?)?;
        let orbit = cm_points(&base.cm, &g, n)?;
        let rep = transitivity_report(&base.cm, &g, &orbit)?;
        out.push(json!({
            "n": n,
            "simply_transitive": rep.simply_transitive(),
            "report": rep,
            "red": orbit.red,
            "seed_class": base.cm.j0,
        }));
    }
    Ok(Value::Array(out))
}

fn metadata(i: &GZInstance) -> Value {
    let g = i.group();
    json!({
        "l": i.l,
        "n": i.n,
        "modulus": i.modulus(),
        "lambda_factor": i.ctx.factor().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "lambda_factor_index": i.ctx.factor_index(),
        "e_lambda_order": i.e_lambda_order.to_string(),
        "complement": i.subs.complement,
        "coset_reps_g0_g1": TowerSubgroups::coset_reps(g, &i.subs.g0, &i.subs.g1.subgroup),
        "coset_reps_g1_g2": TowerSubgroups::coset_reps(g, &i.subs.g1.subgroup, &i.subs.g2),
        "seed_class": i.base.cm.j0,
        "characters": i.characters.iter().map(|c| c.exps.clone()).collect::<Vec<_>>(),
    })
}

fn gzscan(s: &mut Session) -> Result<Value> {
    let mut out = Vec::new();
    for l in s.cfg.l.clone() {
        for n in s.levels() {
            let i = s.inst(l, n)?;
            let rep = main_theorem_report(&i)?;
            out.push(json!({"all_exist": rep.all_exist(), "report": rep, "metadata": metadata(&i)}));
        }
    }
    Ok(Value::Array(out))
}

fn trace_rows(rows: &[TraceReport]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| json!({"x": r.x, "chi": r.chi, "chi0": r.chi0, "chi1": r.chi1, "degree": r.degree, "m": r.m, "equal": r.equal}))
        .collect();
    Value::Array(rows)
}

fn trace_check(s: &mut Session) -> Result<Value> {
    let mut out = Vec::new();
    for l in s.cfg.l.clone() {
        for n in s.levels() {
            let i = s.inst(l, n)?;
            let grid = trace_grid(&i)?;
            let equal = grid.iter().filter(|r| r.equal).count();
            out.push(json!({
                "l": l,
                "n": n,
                "rows": grid.len(),
                "equal": equal,
                "verdicts": trace_rows(&grid),
                "metadata": metadata(&i),
            }));
        }
    }
    Ok(Value::Array(out))
}

fn survey(s: &mut Session) -> Result<Value> {
    let l = s.cfg.l[0];
    let n = s.cfg.n_max;
    let i = s.inst(l, n)?;
    let g = i.group();
    let reps = TowerSubgroups::coset_reps(g, &i.subs.g0, &i.subs.g1.subgroup);
    let rep = distribution_survey(&i.orbit, g, &reps, i.base.cm.classes.len());
    Ok(to_value(rep)?)
}

#[derive(Serialize)]
struct TableRow {
    l: u64,
    n: u32,
    chi0: usize,
    chi1: usize,
    chi: usize,
    x: usize,
    primitive: bool,
    ord: Option<u64>,
    bottomed_out: bool,
    mu: u64,
    nu: u64,
    k_exponent: u64,
}

fn table(s: &mut Session) -> Result<Value> {
    let mut rows = Vec::new();
    for l in s.cfg.l.clone() {
        for n in s.levels() {
            let i = s.inst(l, n)?;
            for r in valuation_table(&i)? {
                rows.push(TableRow {
                    l,
                    n: r.n,
                    chi0: r.chi0,
                    chi1: r.chi1,
                    chi: r.chi,
                    x: r.x,
                    primitive: r.primitive,
                    ord: r.ord,
                    bottomed_out: r.bottomed_out,
                    mu: r.mu,
                    nu: r.nu,
                    k_exponent: r.k_exponent,
                });
            }
        }
    }
    to_value(rows)
}

pub fn table_csv(rows: &Value) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record([
        "l", "n", "chi0", "chi1", "chi", "x", "primitive", "ord", "bottomed_out", "mu", "nu", "k_exponent",
    ])
    .map_err(|e| CliError::Io(e.into()))?;
    for r in rows.as_array().into_iter().flatten() {
        let f = |k: &str| match &r[k] {
            Value::Null => String::new(),
            v => v.to_string(),
        };
        w.write_record(
            ["l", "n", "chi0", "chi1", "chi", "x", "primitive", "ord", "bottomed_out", "mu", "nu", "k_exponent"].map(f),
        )
        .map_err(|e| CliError::Io(e.into()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn compute(cmd: &str, s: &mut Session) -> Result<Value> {
    match cmd {
        "validate" => validate(s),
        "classgroup" => classgroup(s),
        "tower" => tower(s),
        "brandt" => brandt(s),
        "eigen" => eigen(s),
        "mu-nu" => mu_nu(s),
        "cmpoints" => cmpoints(s),
        "gzscan" => gzscan(s),
        "trace-check" => trace_check(s),
        "survey" => survey(s),
        "table" => table(s),
        _ => Err(CliError::Config(format!("unknown command `{cmd}`"))),
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Run one subcommand, writing `<cmd>.json` (and `valuation_table.csv` for
/// `table`) into `out`. Returns the written files.
pub fn run(cmd: &str, cfg: &InstanceConfig, out: &Path, cache_dir: &Path) -> Result<Vec<PathBuf>> {
    if !COMMANDS.contains(&cmd) {
        return Err(CliError::Config(format!("unknown command `{cmd}`")));
    }
    fs::create_dir_all(out)?;
    let cache = Cache::new(cache_dir)?;
    let canonical = cfg.canonical();
    let mut session = Session::new(cfg);
    let hyp = session.hypotheses()?;
    let failed = hyp.iter().any(|(_, r)| !r.all_pass());
    let key = format!("{cmd}\n{canonical}");
    let payload = if cmd == "validate" || failed {
        validate(&session)?
    } else {
        cache.get_or_compute(&key, || compute(cmd, &mut session))?
    };
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": if failed { "validate" } else { cmd },
        "config_digest": digest(canonical.as_bytes()),
        "payload": payload,
    });
    let json_path = out.join(format!("{}.json", if failed { "validate" } else { cmd }));
    write_json(&json_path, &summary)?;
    let mut written = vec![json_path];
    if failed {
        return Err(CliError::Hypothesis(summary["payload"].clone()));
    }
    if cmd == "table" && cfg.format == Format::Csv {
        let path = out.join("valuation_table.csv");
        fs::write(&path, table_csv(&summary["payload"])?)?;
        written.push(path);
    }
    Ok(written)
}
