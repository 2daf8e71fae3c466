//! Run configuration: `section.key = value` lines with `#` comments.
//!
//! Every key has a default, unknown or repeated keys are errors, and
//! [`RunConfig::print`] writes every key so that `parse(print(c)) == c`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::diffuse::{DiffuseParams, InnerAnchoring, Model};
use crate::energy::{ElasticConstants, SurfaceParams};
use crate::grid::{FieldState, GridSpec, ScalarField};
use crate::init::{self, DirectorInit};
use crate::linalg::Vec3;
use crate::optimizer::{Mode, Schedule};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeInit {
    Ball { radius: f64, center: Vec3 },
    Ellipsoid { axes: Vec3 },
    /// Radius defaults to that of the ball of the target volume.
    RandomBlob { radius: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dims: [usize; 3],
    pub lengths: [f64; 3],
    pub elastic: ElasticConstants,
    pub gamma: f64,
    pub lambda: f64,
    pub volume: f64,
    pub eps_phi: f64,
    pub eps_v: f64,
    pub eta: f64,
    pub inner: InnerAnchoring,
    pub schedule: Schedule,
    pub seed: u64,
    pub shape: ShapeInit,
    pub director: DirectorInit,
    /// Amplitude of seeded noise added to the initial director.
    pub noise: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let radius = 0.6;
        Self {
            dims: [48; 3],
            lengths: [2.0; 3],
            elastic: ElasticConstants::one_constant(1.0),
            gamma: 1.0,
            lambda: 0.0,
            volume: init::ball_volume(radius),
            eps_phi: 2.0 * 2.0 / 48.0,
            eps_v: 2.0 * 2.0 / 48.0,
            eta: 1e-3,
            inner: InnerAnchoring::IsotropicOnly,
            schedule: Schedule::default(),
            seed: 0,
            shape: ShapeInit::Ball { radius, center: [0.0; 3] },
            director: DirectorInit::Uniform([0.0, 0.0, 1.0]),
            noise: 0.0,
        }
    }
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn shape_str(s: &ShapeInit) -> String {
    match s {
        ShapeInit::Ball { radius, center } => format!("ball({radius}, {})", list(center)),
        ShapeInit::Ellipsoid { axes } => format!("ellipsoid({})", list(axes)),
        ShapeInit::RandomBlob { radius: Some(r) } => format!("random-blob({r})"),
        ShapeInit::RandomBlob { radius: None } => "random-blob".into(),
    }
}

fn director_str(d: &DirectorInit) -> String {
    match d {
        DirectorInit::Uniform(a) => format!("uniform({})", list(a)),
        DirectorInit::Hedgehog => "hedgehog".into(),
        DirectorInit::Twist(q) => format!("twist({q})"),
        DirectorInit::Random => "random".into(),
    }
}

/// Splits `name(a, b, c)` into the name and its arguments.
fn call(value: &str) -> std::result::Result<(&str, Vec<&str>), String> {
    match value.find('(') {
        None => Ok((value, Vec::new())),
        Some(open) => {
            let inner = value[open + 1..].strip_suffix(')').ok_or_else(|| format!("missing `)` in `{value}`"))?;
            let args = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            Ok((value[..open].trim(), args))
        }
    }
}

fn parse_num<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.trim().parse().map_err(|_| format!("cannot parse `{s}` as a number"))
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = parse_num(s)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(parse_num).collect()
}

fn parse_f64s(args: &[&str], n: usize, what: &str) -> std::result::Result<Vec<f64>, String> {
    if args.len() != n {
        return Err(format!("{what} takes {n} arguments, got {}", args.len()));
    }
    args.iter().map(|a| parse_f64(a)).collect()
}

fn parse_shape(value: &str) -> std::result::Result<ShapeInit, String> {
    let (name, args) = call(value)?;
    match name {
        "ball" => match args.len() {
            1 => Ok(ShapeInit::Ball { radius: parse_f64(args[0])?, center: [0.0; 3] }),
            _ => {
                let v = parse_f64s(&args, 4, "ball(R, cx, cy, cz)")?;
                Ok(ShapeInit::Ball { radius: v[0], center: [v[1], v[2], v[3]] })
            }
        },
        "ellipsoid" => {
            let v = parse_f64s(&args, 3, "ellipsoid(a, b, c)")?;
            Ok(ShapeInit::Ellipsoid { axes: [v[0], v[1], v[2]] })
        }
        "random-blob" => match args.as_slice() {
            [] => Ok(ShapeInit::RandomBlob { radius: None }),
            [r] => Ok(ShapeInit::RandomBlob { radius: Some(parse_f64(r)?) }),
            _ => Err("random-blob takes at most one argument".into()),
        },
        other => Err(format!("unknown shape `{other}`")),
    }
}

fn parse_director(value: &str) -> std::result::Result<DirectorInit, String> {
    let (name, args) = call(value)?;
    match (name, args.as_slice()) {
        ("uniform", [axis]) => match *axis {
            "x" => Ok(DirectorInit::Uniform([1.0, 0.0, 0.0])),
            "y" => Ok(DirectorInit::Uniform([0.0, 1.0, 0.0])),
            "z" => Ok(DirectorInit::Uniform([0.0, 0.0, 1.0])),
            other => Err(format!("unknown axis `{other}`")),
        },
        ("uniform", _) => {
            let v = parse_f64s(&args, 3, "uniform(a, b, c)")?;
            if v.iter().all(|x| *x == 0.0) {
                return Err("uniform director needs a nonzero axis".into());
            }
            Ok(DirectorInit::Uniform([v[0], v[1], v[2]]))
        }
        ("hedgehog", []) => Ok(DirectorInit::Hedgehog),
        ("random", []) => Ok(DirectorInit::Random),
        ("twist", [q]) => Ok(DirectorInit::Twist(parse_f64(q)?)),
        _ => Err(format!("unknown director `{value}`")),
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line, message };
            let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            c.set(key, value).map_err(err)?;
        }
        Ok(c)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.schedule;
        match key {
            "grid.nx" => self.dims[0] = parse_num(value)?,
            "grid.ny" => self.dims[1] = parse_num(value)?,
            "grid.nz" => self.dims[2] = parse_num(value)?,
            "grid.lx" => self.lengths[0] = parse_f64(value)?,
            "grid.ly" => self.lengths[1] = parse_f64(value)?,
            "grid.lz" => self.lengths[2] = parse_f64(value)?,
            "elastic.k11" => self.elastic.k11 = parse_f64(value)?,
            "elastic.k22" => self.elastic.k22 = parse_f64(value)?,
            "elastic.k33" => self.elastic.k33 = parse_f64(value)?,
            "elastic.k24" => self.elastic.k24 = parse_f64(value)?,
            "elastic.q0" => self.elastic.q0 = parse_f64(value)?,
            "surface.gamma" => self.gamma = parse_f64(value)?,
            "surface.lambda" => self.lambda = parse_f64(value)?,
            "constraint.volume" => self.volume = parse_f64(value)?,
            "diffuse.eps_phi" => self.eps_phi = parse_f64(value)?,
            "diffuse.eps_v" => self.eps_v = parse_f64(value)?,
            "diffuse.eta" => self.eta = parse_f64(value)?,
            "diffuse.inner_anchoring_mode" => self.inner = value.parse().map_err(|e: Error| e.to_string())?,
            "opt.max_outer_iters" => s.max_outer_iters = parse_num(value)?,
            "opt.tol_rel_energy" => s.tol_rel_energy = parse_f64(value)?,
            "opt.tau_n" => s.tau[0] = parse_f64(value)?,
            "opt.tau_phi" => s.tau[1] = parse_f64(value)?,
            "opt.tau_v" => s.tau[2] = parse_f64(value)?,
            "opt.backtrack" => s.backtrack = parse_f64(value)?,
            "opt.eps_ladder" => s.eps_ladder = parse_list(value)?,
            "opt.rung_iters" => s.rung_iters = parse_list(value)?,
            "opt.lambda_ladder" => s.lambda_ladder = parse_list(value)?,
            "opt.update_phi" => s.update_phi = parse_bool(value)?,
            "opt.update_v" => s.update_v = parse_bool(value)?,
            "run.mode" => s.mode = value.parse().map_err(|e: Error| e.to_string())?,
            "run.seed" => self.seed = parse_num(value)?,
            "init.shape" => self.shape = parse_shape(value)?,
            "init.director" => self.director = parse_director(value)?,
            "init.noise" => self.noise = parse_f64(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Every key, one per line, in a fixed order.
    pub fn print(&self) -> String {
        let s = &self.schedule;
        let k = &self.elastic;
        let mut out = String::new();
        let mut kv = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        kv("grid.nx", self.dims[0].to_string());
        kv("grid.ny", self.dims[1].to_string());
        kv("grid.nz", self.dims[2].to_string());
        kv("grid.lx", self.lengths[0].to_string());
        kv("grid.ly", self.lengths[1].to_string());
        kv("grid.lz", self.lengths[2].to_string());
        kv("elastic.k11", k.k11.to_string());
        kv("elastic.k22", k.k22.to_string());
        kv("elastic.k33", k.k33.to_string());
        kv("elastic.k24", k.k24.to_string());
        kv("elastic.q0", k.q0.to_string());
        kv("surface.gamma", self.gamma.to_string());
        kv("surface.lambda", self.lambda.to_string());
        kv("constraint.volume", self.volume.to_string());
        kv("diffuse.eps_phi", self.eps_phi.to_string());
        kv("diffuse.eps_v", self.eps_v.to_string());
        kv("diffuse.eta", self.eta.to_string());
        kv("diffuse.inner_anchoring_mode", self.inner.as_str().into());
        kv("opt.max_outer_iters", s.max_outer_iters.to_string());
        kv("opt.tol_rel_energy", s.tol_rel_energy.to_string());
        kv("opt.tau_n", s.tau[0].to_string());
        kv("opt.tau_phi", s.tau[1].to_string());
        kv("opt.tau_v", s.tau[2].to_string());
        kv("opt.backtrack", s.backtrack.to_string());
        kv("opt.eps_ladder", list(&s.eps_ladder));
        kv("opt.rung_iters", list(&s.rung_iters));
        kv("opt.lambda_ladder", list(&s.lambda_ladder));
        kv("opt.update_phi", s.update_phi.to_string());
        kv("opt.update_v", s.update_v.to_string());
        kv("run.mode", s.mode.as_str().into());
        kv("run.seed", self.seed.to_string());
        kv("init.shape", shape_str(&self.shape));
        kv("init.director", director_str(&self.director));
        kv("init.noise", self.noise.to_string());
        out
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.dims, self.lengths)
    }

    pub fn model(&self) -> Result<Model> {
        let surface = SurfaceParams::new(self.gamma, self.lambda)?;
        let diffuse = DiffuseParams::new(self.eps_phi, self.eps_v, self.eta, self.inner)?;
        Model::new(self.elastic, surface, diffuse)
    }

    /// Checks every invariant; returns the warnings of a valid config.
    /// Ericksen violations surface as [`Error::Ericksen`].
    pub fn validate(&self) -> Result<Vec<String>> {
        let grid = self.grid()?;
        let model = self.model()?;
        model.diffuse.check_resolution(&grid)?;
        self.schedule.validate()?;
        if !(self.volume > 0.0 && self.volume < grid.box_volume()) {
            return Err(Error::MalformedParameter(format!(
                "volume {} must lie in (0, {})",
                self.volume,
                grid.box_volume()
            )));
        }
        if !(self.noise >= 0.0) {
            return Err(Error::MalformedParameter(format!("init.noise must be >= 0, got {}", self.noise)));
        }
        let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0);
        let shape_ok = match self.shape {
            ShapeInit::Ball { radius, .. } => radius > 0.0,
            ShapeInit::Ellipsoid { axes } => positive(&axes),
            ShapeInit::RandomBlob { radius } => radius.is_none_or(|r| r > 0.0),
        };
        if !shape_ok {
            return Err(Error::MalformedParameter(format!("init.shape needs positive sizes: {}", shape_str(&self.shape))));
        }
        let mut warnings = Vec::new();
        if !model.surface.convexity_safe() {
            warnings.push(format!(
                "surface.lambda = {} lies outside [-1/2, 1]; convexity-safe off",
                self.lambda
            ));
        }
        Ok(warnings)
    }

    /// Initial fields. The shape is laid out at the width of the first
    /// annealing rung when the shape is free.
    pub fn initial_state(&self) -> Result<FieldState> {
        let grid = self.grid()?;
        let factor = if self.schedule.update_phi { self.schedule.eps_ladder.first().copied().unwrap_or(1.0) } else { 1.0 };
        let eps = factor * self.eps_phi;
        let phi = match self.shape {
            ShapeInit::Ball { radius, center } => init::smoothed_ball(grid, radius, center, eps),
            ShapeInit::Ellipsoid { axes } => init::smoothed_ellipsoid(grid, axes, [0.0; 3], eps),
            ShapeInit::RandomBlob { radius } => {
                let r = radius.unwrap_or_else(|| (3.0 * self.volume / (4.0 * std::f64::consts::PI)).cbrt());
                init::random_blob(grid, r, eps, self.seed)
            }
        };
        let mut n = init::director(grid, &self.director, self.seed)?;
        if self.noise > 0.0 {
            n = init::perturb_director(&n, self.noise, self.seed.wrapping_add(1));
        }
        FieldState::new(n, phi, ScalarField::constant(grid, 1.0))
    }

    pub fn mode(&self) -> Mode {
        self.schedule.mode
    }
}
