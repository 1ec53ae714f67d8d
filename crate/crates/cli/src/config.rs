use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use maglat_core::fields::{FieldKind, Gauge, MagneticField};
use maglat_core::interface::Ramp;
use maglat_core::Rect;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Task {
    Spectrum,
    Butterfly,
    Chern,
    Winding,
    Duality,
    PowerRieffel,
    Fourier,
    Norms,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::Spectrum,
        Task::Butterfly,
        Task::Chern,
        Task::Winding,
        Task::Duality,
        Task::PowerRieffel,
        Task::Fourier,
        Task::Norms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Spectrum => "spectrum",
            Task::Butterfly => "butterfly",
            Task::Chern => "chern",
            Task::Winding => "winding",
            Task::Duality => "duality",
            Task::PowerRieffel => "power-rieffel",
            Task::Fourier => "fourier",
            Task::Norms => "norms",
        }
    }

    fn parse(path: &str, s: &str) -> CliResult<Task> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| CliError::config(path, format!("unknown task {s:?}")))
    }
}

/// Field strength in radians of flux per plaquette, with its exact value
/// `2 pi p / q` when the text is a rational multiple of pi.
#[derive(Clone, Debug, PartialEq)]
pub struct Strength {
    pub text: String,
    pub value: f64,
    pub rational: Option<(i64, i64)>,
}

impl Strength {
    fn to_json(&self) -> Value {
        Value::String(self.text.clone())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn reduce(n: i64, d: i64) -> (i64, i64) {
    let g = gcd(n, d).max(1) * d.signum();
    (n / g, d / g)
}

/// Parses products and quotients of numbers and `pi`, e.g. `2pi*1/3`,
/// `pi/3`, `-4pi/5`, `0.25`.
pub fn parse_strength(path: &str, text: &str) -> CliResult<Strength> {
    let bad = || CliError::config(path, format!("cannot parse strength {text:?}; use forms like \"0.5\", \"pi/3\" or \"2pi*1/3\""));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let mut value = 1.0;
    let mut pi_power = 0i32;
    let mut exact: Option<(i64, i64)> = Some((1, 1));
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = &rest[..end];
        let (num_text, has_pi) = match token.strip_suffix("pi") {
            Some(n) => (n, true),
            None => (token, false),
        };
        let (factor, integer) = if num_text.is_empty() {
            if !has_pi {
                return Err(bad());
            }
            (1.0, Some(1))
        } else {
            if num_text.starts_with(['+', '-']) {
                return Err(bad());
            }
            let v: f64 = num_text.parse().map_err(|_| bad())?;
            if !v.is_finite() {
                return Err(bad());
            }
            (v, num_text.parse::<i64>().ok())
        };
        let factor = if has_pi { factor * PI } else { factor };
        let sign = if op == '*' { 1 } else { -1 };
        if has_pi {
            pi_power += sign;
        }
        match op {
            '*' => value *= factor,
            _ => {
                if factor == 0.0 {
                    return Err(bad());
                }
                value /= factor
            }
        }
        exact = match (exact, integer) {
            (Some((n, d)), Some(i)) if op == '*' => Some(reduce(n * i, d)),
            (Some((n, d)), Some(i)) => Some(reduce(n, d * i)),
            _ => None,
        };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
        if rest.is_empty() {
            return Err(bad());
        }
    }
    if negative {
        value = -value;
        exact = exact.map(|(n, d)| (-n, d));
    }
    // value = (n / d) pi^pi_power; a rational multiple of 2 pi needs power 1.
    let rational = match (exact, pi_power) {
        (Some((n, d)), 1) => Some(reduce(n, 2 * d)),
        (Some((0, _)), _) => Some((0, 1)),
        _ if value == 0.0 => Some((0, 1)),
        _ => None,
    };
    Ok(Strength { text: text.to_string(), value, rational })
}

fn strength_value(path: &str, v: &Value) -> CliResult<Strength> {
    match v {
        Value::String(s) => parse_strength(path, s),
        Value::Number(n) => {
            let value = n.as_f64().ok_or_else(|| CliError::config(path, "not a finite number"))?;
            Ok(Strength { text: n.to_string(), value, rational: (value == 0.0).then_some((0, 1)) })
        }
        _ => Err(CliError::config(path, "expected a strength string or number")),
    }
}

/// A plain real given as a number or as a fraction string like `"1/5"`.
fn real_value(path: &str, v: &Value) -> CliResult<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| CliError::config(path, "not a finite number")),
        Value::String(s) => {
            let st = parse_strength(path, s)?;
            Ok(st.value)
        }
        _ => Err(CliError::config(path, "expected a number or a fraction string")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    Constant { b: Strength },
    Iwatsuka { b_minus: Strength, b_zero: Strength, b_plus: Strength },
    Localized { sites: Vec<(i64, i64)>, b: Strength },
    Custom { window: Rect, values: Vec<f64> },
}

impl FieldSpec {
    pub fn build(&self, path: &str) -> CliResult<MagneticField> {
        let kind = match self {
            FieldSpec::Constant { b } => FieldKind::Constant { b: b.value },
            FieldSpec::Iwatsuka { b_minus, b_zero, b_plus } => {
                FieldKind::Iwatsuka { b_minus: b_minus.value, b_zero: b_zero.value, b_plus: b_plus.value }
            }
            FieldSpec::Localized { sites, b } => FieldKind::Localized { sites: sites.iter().copied().collect(), b: b.value },
            FieldSpec::Custom { window, values } => FieldKind::CustomGrid { window: *window, values: values.clone() },
        };
        maglat_core::fields::build_field(kind).map_err(|e| CliError::config(path, e.to_string()))
    }

    fn to_json(&self) -> Value {
        match self {
            FieldSpec::Constant { b } => json!({"type": "constant", "b": b.to_json()}),
            FieldSpec::Iwatsuka { b_minus, b_zero, b_plus } => json!({
                "type": "iwatsuka", "b_minus": b_minus.to_json(), "b_zero": b_zero.to_json(), "b_plus": b_plus.to_json()
            }),
            FieldSpec::Localized { sites, b } => json!({
                "type": "localized", "sites": sites.iter().map(|s| json!([s.0, s.1])).collect::<Vec<_>>(), "b": b.to_json()
            }),
            FieldSpec::Custom { window, values } => json!({
                "type": "custom",
                "window": {"x0": window.x0, "y0": window.y0, "width": window.width, "height": window.height},
                "values": values,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeltaSpec {
    Interval(f64, f64),
    Auto,
    Scalar(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Numerics {
    pub l: usize,
    pub m: usize,
    pub k_points: usize,
    pub w_f: usize,
    pub bz_grid: (usize, usize),
    pub boxes: Option<Vec<usize>>,
    /// Circle grid size for the Power-Rieffel task.
    pub k: usize,
    pub q_max: usize,
    pub cesaro_orders: Vec<usize>,
    pub sobolev_orders: Vec<u32>,
    pub p: u32,
    pub ramp: Ramp,
    pub weight_threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub field: Option<FieldSpec>,
    pub gauge: Gauge,
    pub numerics: Numerics,
    pub delta: Option<DeltaSpec>,
    pub mu: Option<f64>,
    pub theta: Option<f64>,
    pub output_directory: PathBuf,
    pub formats: Vec<Format>,
}

struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Obj<'a> {
    fn new(path: &str, v: &'a Value, allowed: &[&str]) -> CliResult<Self> {
        let map = v.as_object().ok_or_else(|| CliError::config(path, "expected an object"))?;
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::config(join(path, key), format!("unknown key; allowed: {}", allowed.join(", "))));
            }
        }
        Ok(Obj { path: path.to_string(), map })
    }

    fn get(&self, key: &str) -> Option<(&'a Value, String)> {
        self.map.get(key).filter(|v| !v.is_null()).map(|v| (v, join(&self.path, key)))
    }

    fn require(&self, key: &str) -> CliResult<(&'a Value, String)> {
        self.get(key).ok_or_else(|| CliError::config(join(&self.path, key), "required field is missing"))
    }

    fn positive(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.get(key) {
            None => Ok(default),
            Some((v, p)) => positive_int(&p, v),
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn positive_int(path: &str, v: &Value) -> CliResult<usize> {
    match v.as_u64() {
        Some(n) if n > 0 => Ok(n as usize),
        _ => Err(CliError::config(path, "expected a positive integer")),
    }
}

fn int_list<T: TryFrom<u64>>(path: &str, v: &Value, allow_zero: bool) -> CliResult<Vec<T>> {
    let items = v.as_array().ok_or_else(|| CliError::config(path, "expected an array of integers"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{path}[{i}]");
            match x.as_u64() {
                Some(n) if allow_zero || n > 0 => T::try_from(n).map_err(|_| CliError::config(&p, "integer out of range")),
                _ => Err(CliError::config(&p, if allow_zero { "expected a non-negative integer" } else { "expected a positive integer" })),
            }
        })
        .collect()
}

fn parse_field(path: &str, v: &Value) -> CliResult<FieldSpec> {
    let kind = v
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config(join(path, "type"), "required string field is missing"))?;
    match kind {
        "constant" => {
            let o = Obj::new(path, v, &["type", "b"])?;
            let (b, p) = o.require("b")?;
            Ok(FieldSpec::Constant { b: strength_value(&p, b)? })
        }
        "iwatsuka" => {
            let o = Obj::new(path, v, &["type", "b_minus", "b_zero", "b_plus"])?;
            let (bm, pm) = o.require("b_minus")?;
            let (bp, pp) = o.require("b_plus")?;
            let b_minus = strength_value(&pm, bm)?;
            let b_zero = match o.get("b_zero") {
                Some((b0, p0)) => strength_value(&p0, b0)?,
                None => b_minus.clone(),
            };
            Ok(FieldSpec::Iwatsuka { b_minus, b_zero, b_plus: strength_value(&pp, bp)? })
        }
        "localized" => {
            let o = Obj::new(path, v, &["type", "sites", "b"])?;
            let (sv, sp) = o.require("sites")?;
            let arr = sv.as_array().ok_or_else(|| CliError::config(&sp, "expected an array of [x, y] pairs"))?;
            let sites = arr
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let pair = s.as_array().filter(|a| a.len() == 2);
                    match pair.map(|a| (a[0].as_i64(), a[1].as_i64())) {
                        Some((Some(x), Some(y))) => Ok((x, y)),
                        _ => Err(CliError::config(format!("{sp}[{i}]"), "expected an [x, y] integer pair")),
                    }
                })
                .collect::<CliResult<Vec<_>>>()?;
            let (b, p) = o.require("b")?;
            Ok(FieldSpec::Localized { sites, b: strength_value(&p, b)? })
        }
        "custom" => {
            let o = Obj::new(path, v, &["type", "window", "values"])?;
            let (wv, wp) = o.require("window")?;
            let w = Obj::new(&wp, wv, &["x0", "y0", "width", "height"])?;
            let coord = |k: &str| -> CliResult<i64> {
                let (x, p) = w.require(k)?;
                x.as_i64().ok_or_else(|| CliError::config(p, "expected an integer"))
            };
            let window = Rect::new(coord("x0")?, coord("y0")?, w.positive("width", 0)?, w.positive("height", 0)?);
            if window.is_empty() {
                return Err(CliError::config(&wp, "width and height are required"));
            }
            let (vv, vp) = o.require("values")?;
            let values = vv
                .as_array()
                .ok_or_else(|| CliError::config(&vp, "expected an array of numbers"))?
                .iter()
                .enumerate()
                .map(|(i, x)| real_value(&format!("{vp}[{i}]"), x))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(FieldSpec::Custom { window, values })
        }
        other => Err(CliError::config(join(path, "type"), format!("unknown field type {other:?}"))),
    }
}

fn parse_gauge(path: &str, v: &Value) -> CliResult<Gauge> {
    match v.as_str() {
        Some("landau") => Ok(Gauge::Landau),
        Some("symmetric") => Ok(Gauge::Symmetric),
        Some("half-line") | Some("half_line") => Ok(Gauge::HalfLine),
        _ => Err(CliError::config(path, "expected \"landau\", \"symmetric\" or \"half-line\"")),
    }
}

fn gauge_name(g: Gauge) -> &'static str {
    match g {
        Gauge::Landau => "landau",
        Gauge::Symmetric => "symmetric",
        Gauge::HalfLine => "half-line",
    }
}

fn parse_delta(path: &str, v: &Value, task: Task) -> CliResult<DeltaSpec> {
    match (task, v) {
        (Task::PowerRieffel, _) => Ok(DeltaSpec::Scalar(real_value(path, v)?)),
        (Task::Duality, Value::String(s)) if s == "auto" => Ok(DeltaSpec::Auto),
        (_, Value::Array(a)) if a.len() == 2 => {
            let lo = real_value(&format!("{path}[0]"), &a[0])?;
            let hi = real_value(&format!("{path}[1]"), &a[1])?;
            if !(lo < hi) {
                return Err(CliError::config(path, format!("delta needs min < max, got [{lo}, {hi}]")));
            }
            Ok(DeltaSpec::Interval(lo, hi))
        }
        _ => Err(CliError::config(path, "expected [min, max]")),
    }
}

/// Applies `--set key.path=value` overrides; the value is parsed as JSON and
/// falls back to a plain string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(assignment, "override must look like key.path=value"))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(key, "empty path segment"));
    }
    for (i, part) in parts.iter().enumerate() {
        let map = cur
            .as_object_mut()
            .ok_or_else(|| CliError::config(parts[..i].join("."), "cannot set a key inside a non-object"))?;
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        cur = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

pub fn parse_document(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::config("<root>", format!("malformed JSON: {e}")))
}

/// Validates a config document. `task` overrides the document's task, which
/// must agree when both are present.
pub fn parse_config(doc: &Value, task: Option<Task>) -> CliResult<RunConfig> {
    let root = Obj::new("", doc, &["model", "task", "numerics", "delta", "mu", "theta", "output"])?;
    let doc_task = match root.get("task") {
        Some((v, p)) => Some(Task::parse(&p, v.as_str().ok_or_else(|| CliError::config(&p, "expected a string"))?)?),
        None => None,
    };
    let task = match (task, doc_task) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::config("task", format!("config says {:?} but the command line asks for {:?}", b.name(), a.name())))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::config("task", "required field is missing")),
    };

    let (mut field, mut gauge) = (None, Gauge::Landau);
    if let Some((mv, mp)) = root.get("model") {
        let model = Obj::new(&mp, mv, &["field", "gauge", "hamiltonian"])?;
        if let Some((fv, fp)) = model.get("field") {
            field = Some(parse_field(&fp, fv)?);
        }
        if let Some((gv, gp)) = model.get("gauge") {
            gauge = parse_gauge(&gp, gv)?;
        }
        if let Some((hv, hp)) = model.get("hamiltonian") {
            if hv.as_str() != Some("harper") {
                return Err(CliError::config(hp, "only \"harper\" is supported"));
            }
        }
    }

    let empty = Value::Object(Map::new());
    let (nv, np) = root.get("numerics").unwrap_or((&empty, "numerics".into()));
    let num = Obj::new(
        &np,
        nv,
        &["L", "M", "k_points", "W_f", "bz_grid", "boxes", "K", "q_max", "cesaro_orders", "sobolev_orders", "p", "ramp", "weight_threshold"],
    )?;
    let m = num.positive("M", 60)?;
    let w_f = num.positive("W_f", (m / 2).max(1))?;
    if w_f > m {
        return Err(CliError::config(join(&np, "W_f"), format!("filter half-width {w_f} exceeds the strip half-width {m}")));
    }
    let k_points = num.positive("k_points", 401)?;
    if k_points < 3 {
        return Err(CliError::config(join(&np, "k_points"), "at least 3 points are needed"));
    }
    let bz_grid = match num.get("bz_grid") {
        None => (60, 60),
        Some((v, p)) => {
            let g: Vec<usize> = int_list(&p, v, false)?;
            match g.as_slice() {
                [a, b] if *a >= 3 && *b >= 3 => (*a, *b),
                _ => return Err(CliError::config(p, "expected [N1, N2] with both at least 3")),
            }
        }
    };
    let boxes = match num.get("boxes") {
        None => None,
        Some((v, p)) => Some(int_list(&p, v, false)?),
    };
    let cesaro_orders = match num.get("cesaro_orders") {
        None => vec![1, 2, 4, 8, 16],
        Some((v, p)) => int_list(&p, v, false)?,
    };
    let sobolev_orders = match num.get("sobolev_orders") {
        None => vec![0, 1, 2, 3],
        Some((v, p)) => int_list(&p, v, true)?,
    };
    let p = num.positive("p", 2)? as u32;
    if p > 2 {
        return Err(CliError::config(join(&np, "p"), "only p = 1 and p = 2 are supported"));
    }
    let ramp = match num.get("ramp") {
        None => Ramp::Cosine,
        Some((v, path)) => match v.as_str() {
            Some("cosine") => Ramp::Cosine,
            Some("quintic") => Ramp::Quintic,
            _ => return Err(CliError::config(path, "expected \"cosine\" or \"quintic\"")),
        },
    };
    let weight_threshold = match num.get("weight_threshold") {
        None => maglat_core::interface::DEFAULT_WEIGHT_THRESHOLD,
        Some((v, path)) => match v.as_f64() {
            Some(t) if t > 0.0 && t < 1.0 => t,
            _ => return Err(CliError::config(path, "expected a number in (0, 1)")),
        },
    };
    let numerics = Numerics {
        l: num.positive("L", 64)?,
        m,
        k_points,
        w_f,
        bz_grid,
        boxes,
        k: num.positive("K", 600)?,
        q_max: num.positive("q_max", 12)?,
        cesaro_orders,
        sobolev_orders,
        p,
        ramp,
        weight_threshold,
    };

    let delta = match root.get("delta") {
        None => None,
        Some((v, p)) => Some(parse_delta(&p, v, task)?),
    };
    let mu = match root.get("mu") {
        None => None,
        Some((v, p)) => Some(real_value(&p, v)?),
    };
    let theta = match root.get("theta") {
        None => None,
        Some((v, p)) => Some(real_value(&p, v)?),
    };

    let (mut output_directory, mut formats) = (PathBuf::from("maglat-out"), vec![Format::Json, Format::Csv]);
    if let Some((ov, op)) = root.get("output") {
        let out = Obj::new(&op, ov, &["directory", "formats"])?;
        if let Some((d, p)) = out.get("directory") {
            output_directory = PathBuf::from(d.as_str().ok_or_else(|| CliError::config(p, "expected a path string"))?);
        }
        if let Some((f, p)) = out.get("formats") {
            let items = f.as_array().ok_or_else(|| CliError::config(&p, "expected an array"))?;
            formats = items
                .iter()
                .enumerate()
                .map(|(i, x)| match x.as_str() {
                    Some("json") => Ok(Format::Json),
                    Some("csv") => Ok(Format::Csv),
                    _ => Err(CliError::config(format!("{p}[{i}]"), "expected \"json\" or \"csv\"")),
                })
                .collect::<CliResult<_>>()?;
        }
    }

    let config = RunConfig { task, field, gauge, numerics, delta, mu, theta, output_directory, formats };
    check_required(&config)?;
    Ok(config)
}

fn check_required(c: &RunConfig) -> CliResult<()> {
    let need_field = |kinds: &[&str]| -> CliResult<()> {
        let kind = match &c.field {
            None => return Err(CliError::config("model.field", format!("task {:?} needs a field", c.task.name()))),
            Some(FieldSpec::Constant { .. }) => "constant",
            Some(FieldSpec::Iwatsuka { .. }) => "iwatsuka",
            Some(FieldSpec::Localized { .. }) => "localized",
            Some(FieldSpec::Custom { .. }) => "custom",
        };
        if kinds.contains(&kind) {
            Ok(())
        } else {
            Err(CliError::config("model.field.type", format!("task {:?} needs a field of type {}", c.task.name(), kinds.join(" or "))))
        }
    };
    let need_interval = || match &c.delta {
        Some(DeltaSpec::Interval(..)) | Some(DeltaSpec::Auto) => Ok(()),
        _ => Err(CliError::config("delta", format!("task {:?} needs delta = [min, max]", c.task.name()))),
    };
    let rational = |s: &Strength, path: &str| {
        s.rational
            .map(|_| ())
            .ok_or_else(|| CliError::config(path, format!("{:?} is not a rational multiple of 2pi", s.text)))
    };
    match c.task {
        Task::Spectrum => need_field(&["constant", "iwatsuka"]),
        Task::Butterfly => Ok(()),
        Task::Chern => {
            need_field(&["constant"])?;
            if let Some(FieldSpec::Constant { b }) = &c.field {
                rational(b, "model.field.b")?;
            }
            Ok(())
        }
        Task::Winding => {
            need_field(&["constant", "iwatsuka"])?;
            match &c.delta {
                Some(DeltaSpec::Interval(..)) => Ok(()),
                _ => Err(CliError::config("delta", "task \"winding\" needs delta = [min, max]")),
            }
        }
        Task::Duality => {
            need_field(&["iwatsuka"])?;
            if let Some(FieldSpec::Iwatsuka { b_minus, b_plus, .. }) = &c.field {
                rational(b_minus, "model.field.b_minus")?;
                rational(b_plus, "model.field.b_plus")?;
            }
            need_interval()
        }
        Task::PowerRieffel => {
            if c.theta.is_none() {
                return Err(CliError::config("theta", "task \"power-rieffel\" needs theta"));
            }
            match c.delta {
                Some(DeltaSpec::Scalar(_)) => Ok(()),
                _ => Err(CliError::config("delta", "task \"power-rieffel\" needs a scalar delta")),
            }
        }
        Task::Fourier | Task::Norms => need_field(&["constant", "iwatsuka", "localized", "custom"]),
    }
}

impl RunConfig {
    /// Normalized echo of the config for reports.
    pub fn to_json(&self) -> Value {
        let n = &self.numerics;
        let mut numerics = BTreeMap::new();
        numerics.insert("L", json!(n.l));
        numerics.insert("M", json!(n.m));
        numerics.insert("k_points", json!(n.k_points));
        numerics.insert("W_f", json!(n.w_f));
        numerics.insert("bz_grid", json!([n.bz_grid.0, n.bz_grid.1]));
        numerics.insert("boxes", json!(n.boxes));
        numerics.insert("K", json!(n.k));
        numerics.insert("q_max", json!(n.q_max));
        numerics.insert("cesaro_orders", json!(n.cesaro_orders));
        numerics.insert("sobolev_orders", json!(n.sobolev_orders));
        numerics.insert("p", json!(n.p));
        numerics.insert("ramp", json!(match n.ramp { Ramp::Cosine => "cosine", Ramp::Quintic => "quintic" }));
        numerics.insert("weight_threshold", json!(n.weight_threshold));
        let delta = match &self.delta {
            None => Value::Null,
            Some(DeltaSpec::Interval(a, b)) => json!([a, b]),
            Some(DeltaSpec::Auto) => json!("auto"),
            Some(DeltaSpec::Scalar(x)) => json!(x),
        };
        json!({
            "task": self.task.name(),
            "model": {
                "field": self.field.as_ref().map(FieldSpec::to_json),
                "gauge": gauge_name(self.gauge),
                "hamiltonian": "harper",
            },
            "numerics": numerics,
            "delta": delta,
            "mu": self.mu,
            "theta": self.theta,
            "output": {
                "directory": self.output_directory.display().to_string(),
                "formats": self.formats.iter().map(|f| match f { Format::Json => "json", Format::Csv => "csv" }).collect::<Vec<_>>(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn strength(s: &str) -> Strength {
        parse_strength("b", s).unwrap()
    }

    #[test]
    fn strength_sugar() {
        let s = strength("2pi*1/3");
        assert!((s.value - TAU / 3.0).abs() < 1e-15);
        assert_eq!(s.rational, Some((1, 3)));
        assert_eq!(strength("pi/3").rational, Some((1, 6)));
        assert_eq!(strength("2pi/3").rational, Some((1, 3)));
        assert_eq!(strength("4pi/3").rational, Some((2, 3)));
        assert_eq!(strength("-2pi/5").rational, Some((-1, 5)));
        assert_eq!(strength("2 * pi / 5").rational, Some((1, 5)));
        assert_eq!(strength("pi").rational, Some((1, 2)));
        assert_eq!(strength("0").rational, Some((0, 1)));
        assert!((strength("pi/3").value - PI / 3.0).abs() < 1e-15);
        let d = strength("0.25");
        assert_eq!((d.value, d.rational), (0.25, None));
        assert_eq!(strength("1/5").value, 0.2);
        assert_eq!(strength("1.5pi").rational, None);
        for bad in ["", "pi*", "x", "1/0", "2pix", "--1", "*pi"] {
            assert!(parse_strength("b", bad).is_err(), "{bad:?} accepted");
        }
    }

    fn doc(s: &str) -> Value {
        parse_document(s).unwrap()
    }

    #[test]
    fn minimal_duality_config_fills_defaults() {
        let d = doc(r#"{"model":{"field":{"type":"iwatsuka","b_minus":"0","b_zero":"pi/3","b_plus":"2pi/3"}},"task":"duality","delta":[-3.0,-2.6]}"#);
        let c = parse_config(&d, None).unwrap();
        assert_eq!(c.task, Task::Duality);
        assert_eq!((c.numerics.m, c.numerics.k_points, c.numerics.w_f, c.numerics.l, c.numerics.bz_grid), (60, 401, 30, 64, (60, 60)));
        assert_eq!(c.delta, Some(DeltaSpec::Interval(-3.0, -2.6)));
        // The echo parses back to the same config.
        assert_eq!(parse_config(&c.to_json(), None).unwrap(), c);
    }

    fn config_error(s: &str) -> String {
        match parse_config(&doc(s), None) {
            Err(CliError::Config { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn schema_violations_name_the_field() {
        assert_eq!(config_error(r#"{"model":{"field":{"type":"iwatsuka","b_minus":"0","b_plus":"2pi/3"}},"task":"duality"}"#), "delta");
        assert_eq!(config_error(r#"{"task":"duality","model":{"field":{"type":"iwatsuka","b_minus":"0.3","b_plus":"2pi/3"}},"delta":[0,1]}"#), "model.field.b_minus");
        assert_eq!(config_error(r#"{"task":"spectrum","model":{"field":{"type":"constant","b":"x"}}}"#), "model.field.b");
        assert_eq!(config_error(r#"{"task":"spectrum","model":{"field":{"type":"constant","b":1}},"numerics":{"M":0}}"#), "numerics.M");
        assert_eq!(config_error(r#"{"task":"spectrum","model":{"field":{"type":"constant","b":1}},"numerics":{"M":10,"W_f":11}}"#), "numerics.W_f");
        assert_eq!(config_error(r#"{"task":"spectrum","model":{"field":{"type":"constant","b":1}},"numerics":{"typo":1}}"#), "numerics.typo");
        assert_eq!(config_error(r#"{"task":"winding","model":{"field":{"type":"constant","b":1}},"delta":[1,0]}"#), "delta");
        assert_eq!(config_error(r#"{"task":"nope"}"#), "task");
        assert_eq!(config_error(r#"{"task":"power-rieffel","delta":"1/5"}"#), "theta");
        assert_eq!(config_error(r#"{"task":"fourier"}"#), "model.field");
        assert!(matches!(parse_document("{"), Err(CliError::Config { .. })));
    }

    #[test]
    fn overrides_and_task_precedence() {
        let mut d = doc(r#"{"task":"spectrum","model":{"field":{"type":"constant","b":"2pi/3"}}}"#);
        apply_override(&mut d, "numerics.M=12").unwrap();
        apply_override(&mut d, "model.field.b=pi/2").unwrap();
        let c = parse_config(&d, Some(Task::Spectrum)).unwrap();
        assert_eq!(c.numerics.m, 12);
        assert_eq!(c.numerics.w_f, 6);
        assert!(matches!(&c.field, Some(FieldSpec::Constant { b }) if b.rational == Some((1, 4))));
        assert!(parse_config(&d, Some(Task::Chern)).is_err());
        assert!(apply_override(&mut d, "novalue").is_err());
        assert!(apply_override(&mut d, "task.x=1").is_err());
    }

    #[test]
    fn power_rieffel_scalars() {
        let c = parse_config(&doc(r#"{"task":"power-rieffel","theta":"1/3","delta":"1/5"}"#), None).unwrap();
        assert_eq!(c.delta, Some(DeltaSpec::Scalar(0.2)));
        assert!((c.theta.unwrap() - 1.0 / 3.0).abs() < 1e-16);
    }
}
