use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pack::BlockingParams;

#[derive(Clone, Debug, PartialEq)]
pub struct CoreClassDesc {
    pub name: String,
    pub core_count: usize,
    pub relative_speed: f64,
    pub mc_stride: usize,
    pub small_m_mc_stride: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineMode {
    Real,
    Simulated,
}

/// Core classes of an asymmetric machine, fastest first by convention.
#[derive(Clone, Debug, PartialEq)]
pub struct MachineModel {
    pub classes: Vec<CoreClassDesc>,
    pub mode: MachineMode,
}

impl Default for MachineModel {
    fn default() -> Self {
        Self::exynos5422()
    }
}

impl MachineModel {
    /// Four fast cores at relative speed 6 and four slow cores at speed 1.
    pub fn exynos5422() -> Self {
        MachineModel {
            classes: vec![
                CoreClassDesc {
                    name: "big".into(),
                    core_count: 4,
                    relative_speed: 6.0,
                    mc_stride: 152,
                    small_m_mc_stride: 116,
                },
                CoreClassDesc {
                    name: "little".into(),
                    core_count: 4,
                    relative_speed: 1.0,
                    mc_stride: 32,
                    small_m_mc_stride: 24,
                },
            ],
            mode: MachineMode::Real,
        }
    }

    /// `cores` identical cores sharing one Loop-3 stride.
    pub fn homogeneous(cores: usize, mc: usize) -> Self {
        MachineModel {
            classes: vec![CoreClassDesc {
                name: "core".into(),
                core_count: cores,
                relative_speed: 1.0,
                mc_stride: mc,
                small_m_mc_stride: mc,
            }],
            mode: MachineMode::Real,
        }
    }

    pub fn single_core() -> Self {
        Self::homogeneous(1, 152)
    }

    pub fn simulated(mut self) -> Self {
        self.mode = MachineMode::Simulated;
        self
    }

    pub fn with_strides(mut self, strides: &[usize]) -> Self {
        for (c, &s) in self.classes.iter_mut().zip(strides) {
            c.mc_stride = s;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::InvalidMachine("no core classes".into()));
        }
        for c in &self.classes {
            if c.core_count == 0 {
                return Err(Error::InvalidMachine(format!("class {} has no cores", c.name)));
            }
            if !(c.relative_speed > 0.0 && c.relative_speed.is_finite()) {
                return Err(Error::InvalidMachine(format!("class {} speed must be positive", c.name)));
            }
            if c.mc_stride == 0 || c.small_m_mc_stride == 0 {
                return Err(Error::InvalidMachine(format!("class {} stride must be positive", c.name)));
            }
        }
        Ok(())
    }

    pub fn total_cores(&self) -> usize {
        self.classes.iter().map(|c| c.core_count).sum()
    }

    /// Class of every core, in worker order.
    pub fn core_classes(&self) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(id, c)| std::iter::repeat_n(id, c.core_count))
            .collect()
    }

    /// Σ count × speed.
    pub fn aggregate_speed(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.core_count as f64 * c.relative_speed)
            .sum()
    }

    /// Default blocking parameters with this machine's per-class strides.
    pub fn blocking_params(&self) -> BlockingParams {
        BlockingParams {
            mc_by_class: self.classes.iter().map(|c| c.mc_stride).collect(),
            small_m_mc_by_class: self.classes.iter().map(|c| c.small_m_mc_stride).collect(),
            ..BlockingParams::default()
        }
    }

    /// Parses the machine description format:
    ///
    /// ```text
    /// mode=sim
    /// class big count=4 speed=6.0 mc=152 mc_small=116
    /// class little count=4 speed=1.0 mc=32 mc_small=24
    /// ```
    ///
    /// `#` starts a comment. `mc_small` defaults to `mc`; `mode` defaults to `real`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut classes = Vec::new();
        let mut mode = MachineMode::Real;
        for (lno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lno + 1, msg };
            if let Some(value) = line.strip_prefix("mode=") {
                mode = match value.trim() {
                    "real" => MachineMode::Real,
                    "sim" => MachineMode::Simulated,
                    other => return Err(err(format!("unknown mode '{other}'"))),
                };
                continue;
            }
            let mut toks = line.split_whitespace();
            if toks.next() != Some("class") {
                return Err(err(format!("expected 'class' or 'mode=', found '{line}'")));
            }
            let name = toks.next().ok_or_else(|| err("missing class name".into()))?;
            let (mut count, mut speed, mut mc, mut mc_small) = (None, None, None, None);
            for kv in toks {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected key=value, found '{kv}'")))?;
                let bad = |_| err(format!("bad value for {k}: '{v}'"));
                match k {
                    "count" => count = Some(v.parse::<usize>().map_err(bad)?),
                    "speed" => speed = Some(v.parse::<f64>().map_err(|_| err(format!("bad value for speed: '{v}'")))?),
                    "mc" => mc = Some(v.parse::<usize>().map_err(bad)?),
                    "mc_small" => mc_small = Some(v.parse::<usize>().map_err(bad)?),
                    other => return Err(err(format!("unknown key '{other}'"))),
                }
            }
            let mc = mc.ok_or_else(|| err("missing mc".into()))?;
            classes.push(CoreClassDesc {
                name: name.to_string(),
                core_count: count.ok_or_else(|| err("missing count".into()))?,
                relative_speed: speed.ok_or_else(|| err("missing speed".into()))?,
                mc_stride: mc,
                small_m_mc_stride: mc_small.unwrap_or(mc),
            });
        }
        let model = MachineModel { classes, mode };
        model.validate()?;
        Ok(model)
    }

    pub fn to_file_string(&self) -> String {
        let mut s = format!(
            "mode={}\n",
            match self.mode {
                MachineMode::Real => "real",
                MachineMode::Simulated => "sim",
            }
        );
        for c in &self.classes {
            s.push_str(&format!(
                "class {} count={} speed={} mc={} mc_small={}\n",
                c.name, c.core_count, c.relative_speed, c.mc_stride, c.small_m_mc_stride
            ));
        }
        s
    }
}

/// Parallelization strategy for the level-3 kernels.
///
/// `D3S4` / `D3S5`: dynamic Loop 3 across classes, static Loop 4 / Loop 5
/// inside the claiming class. `ObS4`: Loop 4 split evenly over all cores,
/// blind to asymmetry. `S1S4`, `S3`, `S3S5`: static variants for the
/// triangular solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    D3S4,
    D3S5,
    ObS4,
    S1S4,
    S3,
    S3S5,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::D3S4,
        Strategy::D3S5,
        Strategy::ObS4,
        Strategy::S1S4,
        Strategy::S3,
        Strategy::S3S5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::D3S4 => "D3S4",
            Strategy::D3S5 => "D3S5",
            Strategy::ObS4 => "ObS4",
            Strategy::S1S4 => "S1S4",
            Strategy::S3 => "S3",
            Strategy::S3S5 => "S3S5",
        }
    }

    pub fn is_dynamic(self) -> bool {
        matches!(self, Strategy::D3S4 | Strategy::D3S5)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}
