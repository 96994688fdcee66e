//! FPGA device and board descriptions.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bits per M20K block.
pub const M20K_BITS: usize = 20 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryKind {
    Ddr,
    Hbm,
}

/// Device resources and external memory of one board.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub name: String,
    /// Memory banks (DDR) or pseudo-channels (HBM).
    pub num_banks: usize,
    /// Bus width per bank, in bits.
    pub size_bus: usize,
    /// Effective transfer rate per bus line, in transfers per second.
    pub f_mem: f64,
    pub dsp_total: usize,
    pub bram_blocks: usize,
    pub bram_bits: usize,
    /// BRAM reserved by the board support package, in percent (0 if
    /// unknown).
    pub bsp_bram_overhead: f64,
    /// DSPs spent on address calculation in 2D and 3D kernels.
    pub c_2d: usize,
    pub c_3d: usize,
    pub memory: MemoryKind,
    /// Optional upper bound on `par_time`, standing in for logic limits that
    /// are not modelled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub par_time_cap: Option<usize>,
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidDevice(format!("{}: {what}", self.name)));
        if self.num_banks == 0 || self.size_bus == 0 {
            return bad("memory banks and bus width must be positive");
        }
        if !(self.f_mem.is_finite() && self.f_mem > 0.0) {
            return bad("memory frequency must be positive");
        }
        if self.bram_blocks == 0 || self.bram_bits == 0 {
            return bad("BRAM capacity must be positive");
        }
        if !(0.0..100.0).contains(&self.bsp_bram_overhead) {
            return bad("BSP BRAM overhead must be in [0, 100)");
        }
        if self.par_time_cap == Some(0) {
            return bad("par_time cap must be positive");
        }
        Ok(())
    }

    /// Peak external memory bandwidth in GB/s.
    pub fn th_max(&self) -> f64 {
        crate::perf::th_max(self)
    }

    /// DSP overhead for address calculation.
    pub fn dsp_overhead(&self, is_3d: bool) -> usize {
        if is_3d {
            self.c_3d
        } else {
            self.c_2d
        }
    }

    pub fn stratix_v() -> Self {
        DeviceSpec {
            name: "Stratix V GX A7".into(),
            num_banks: 2,
            size_bus: 64,
            f_mem: 1600e6,
            dsp_total: 256,
            bram_blocks: 2560,
            bram_bits: 2560 * M20K_BITS,
            bsp_bram_overhead: 0.0,
            c_2d: 4,
            c_3d: 8,
            memory: MemoryKind::Ddr,
            par_time_cap: Some(24),
        }
    }

    pub fn arria_10() -> Self {
        DeviceSpec {
            name: "Arria 10 GX 1150".into(),
            num_banks: 2,
            size_bus: 64,
            f_mem: 2133e6,
            dsp_total: 1518,
            bram_blocks: 2713,
            bram_bits: 2713 * M20K_BITS,
            bsp_bram_overhead: 12.0,
            c_2d: 4,
            c_3d: 8,
            memory: MemoryKind::Ddr,
            par_time_cap: None,
        }
    }

    /// HBM2 modelled as 32 pseudo-channels of 128 bits at 1 GT/s.
    pub fn stratix_10_mx() -> Self {
        DeviceSpec {
            name: "Stratix 10 MX 2100".into(),
            num_banks: 32,
            size_bus: 128,
            f_mem: 1000e6,
            dsp_total: 3960,
            bram_blocks: 6847,
            bram_bits: 6847 * M20K_BITS,
            bsp_bram_overhead: 10.0,
            c_2d: 4,
            c_3d: 8,
            memory: MemoryKind::Hbm,
            par_time_cap: None,
        }
    }

    pub fn stratix_10_gx() -> Self {
        DeviceSpec {
            name: "Stratix 10 GX 2800".into(),
            num_banks: 4,
            size_bus: 64,
            f_mem: 2400e6,
            dsp_total: 5760,
            bram_blocks: 11721,
            bram_bits: 11721 * M20K_BITS,
            bsp_bram_overhead: 10.0,
            c_2d: 4,
            c_3d: 8,
            memory: MemoryKind::Ddr,
            par_time_cap: None,
        }
    }

    /// Resolves a built-in device by short or full name.
    pub fn builtin(name: &str) -> Result<Self> {
        name.parse()
    }

    pub fn builtins() -> Vec<DeviceSpec> {
        vec![
            Self::stratix_v(),
            Self::arria_10(),
            Self::stratix_10_mx(),
            Self::stratix_10_gx(),
        ]
    }
}

impl FromStr for DeviceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "sv" | "s5" | "stratixv" | "stratixvgxa7" | "de5net" => Ok(Self::stratix_v()),
            "a10" | "arria10" | "arria10gx1150" | "385a" => Ok(Self::arria_10()),
            "mx" | "mx2100" | "s10mx" | "stratix10mx" | "stratix10mx2100" => {
                Ok(Self::stratix_10_mx())
            }
            "gx" | "gx2800" | "s10gx" | "stratix10gx" | "stratix10gx2800" | "520c" => {
                Ok(Self::stratix_10_gx())
            }
            _ => Err(Error::UnknownBuiltin(s.to_string())),
        }
    }
}
