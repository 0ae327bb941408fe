use crate::error::{Error, Result};

/// Cache and register blocking symbols.
///
/// `mc_by_class[c]` is the Loop-3 stride (rows of `Ac`) used by core class
/// `c`; index 0 is the fast class by convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockingParams {
    pub mr: usize,
    pub nr: usize,
    pub kc: usize,
    pub nc: usize,
    pub mc_by_class: Vec<usize>,
    pub small_m_mc_by_class: Vec<usize>,
    pub small_m_threshold: usize,
}

pub const MR: usize = 4;
pub const NR: usize = 4;
pub const MAX_REGISTER_BLOCK: usize = 16;

impl Default for BlockingParams {
    fn default() -> Self {
        BlockingParams {
            mr: MR,
            nr: NR,
            kc: 352,
            nc: 4096,
            mc_by_class: vec![152, 32],
            small_m_mc_by_class: vec![116, 24],
            small_m_threshold: 512,
        }
    }
}

impl BlockingParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.mr == 0 || self.nr == 0 || self.mr > MAX_REGISTER_BLOCK || self.nr > MAX_REGISTER_BLOCK {
            return bad(format!("mr={} nr={} must lie in 1..={MAX_REGISTER_BLOCK}", self.mr, self.nr));
        }
        if self.kc == 0 || self.nc == 0 {
            return bad(format!("kc={} nc={} must be positive", self.kc, self.nc));
        }
        if self.mc_by_class.is_empty() {
            return bad("no mc entries".into());
        }
        if self.small_m_mc_by_class.len() != self.mc_by_class.len() {
            return bad("mc and small-m mc lists differ in length".into());
        }
        for &mc in self.mc_by_class.iter().chain(&self.small_m_mc_by_class) {
            if mc < self.mr || mc % self.mr != 0 {
                return bad(format!("mc={mc} is not a positive multiple of mr={}", self.mr));
            }
        }
        Ok(())
    }

    /// Stride of the given class, falling back to the last entry when the
    /// machine has more classes than the parameter set.
    pub fn mc_for(&self, class: usize) -> usize {
        self.mc_by_class[class.min(self.mc_by_class.len() - 1)]
    }

    /// Bytes occupied by a full `Ac` buffer for an `mc`-row class.
    pub fn ac_bytes(&self, mc: usize) -> usize {
        mc * self.kc * std::mem::size_of::<f64>()
    }

    /// Bytes occupied by one `kc × nr` micro-panel of `Bc`.
    pub fn bc_micropanel_bytes(&self) -> usize {
        self.kc * self.nr * std::mem::size_of::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = BlockingParams::default();
        p.validate().unwrap();
        assert_eq!((p.mr, p.nr, p.kc, p.nc), (4, 4, 352, 4096));
        assert_eq!(p.mc_by_class, vec![152, 32]);
        assert_eq!(p.small_m_mc_by_class, vec![116, 24]);
    }

    #[test]
    fn bc_micropanel_is_eleven_kib() {
        assert_eq!(BlockingParams::default().bc_micropanel_bytes(), 11 * 1024);
    }

    #[test]
    fn ac_footprints() {
        let p = BlockingParams::default();
        // mc·kc·8 bytes for the two per-class optima (152 and 80 rows)
        assert_eq!(p.ac_bytes(152), 428_032);
        assert_eq!(p.ac_bytes(152) / 1024, 418);
        assert_eq!(p.ac_bytes(80), 225_280);
        assert_eq!(p.ac_bytes(80) / 1024, 220);
    }

    #[test]
    fn rejects_mc_not_multiple_of_mr() {
        let p = BlockingParams {
            mc_by_class: vec![150, 32],
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = BlockingParams {
            mr: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
