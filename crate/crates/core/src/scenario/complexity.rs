use std::fmt;

use crate::link::LinkNetwork;
use crate::reduction::MappingResult;

/// 2^m as a decimal string, exact for any m.
pub fn pow2(m: usize) -> String {
    let mut digits = vec![1u8];
    for _ in 0..m {
        let mut carry = 0;
        for d in digits.iter_mut() {
            let v = *d * 2 + carry;
            *d = v % 10;
            carry = v / 10;
        }
        if carry > 0 {
            digits.push(carry);
        }
    }
    digits.iter().rev().map(|d| char::from(b'0' + d)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub m: usize,
    pub sub_sizes: Vec<usize>,
    pub scenario_total: u128,
}

impl ComplexityReport {
    pub fn full_space(&self) -> String {
        pow2(self.m)
    }

    /// 2^M / Σ 2^(m_i).
    pub fn ratio(&self) -> f64 {
        if self.scenario_total == 0 {
            return f64::INFINITY;
        }
        (self.m as f64 - (self.scenario_total as f64).log2()).exp2()
    }
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M={}  2^M={}  subs={}  sum={}  ratio={:.2}",
            self.m,
            self.full_space(),
            self.sub_sizes.len(),
            self.scenario_total,
            self.ratio()
        )
    }
}

pub fn complexity_report(net: &LinkNetwork, mapping: &MappingResult) -> ComplexityReport {
    ComplexityReport {
        m: net.len(),
        sub_sizes: mapping.subs.iter().map(|s| s.len()).collect(),
        scenario_total: mapping.scenario_total(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(0), "1");
        assert_eq!(pow2(10), "1024");
        assert_eq!(pow2(32), "4294967296");
        assert_eq!(pow2(100), (1u128 << 100).to_string());
    }

    #[test]
    fn single_sub_ratio_is_power_of_two() {
        let r = ComplexityReport { m: 12, sub_sizes: vec![5], scenario_total: 32 };
        assert_eq!(r.ratio(), 128.0);
    }
}
