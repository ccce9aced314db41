use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rule categories in `IAOEFLG` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Id,
    And,
    Or,
    Exists,
    ForAll,
    AtMost,
    AtLeast,
}

impl Rule {
    pub const ALL: [Rule; 7] =
        [Rule::Id, Rule::And, Rule::Or, Rule::Exists, Rule::ForAll, Rule::AtMost, Rule::AtLeast];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        b"IAOEFLG"[self as usize] as char
    }
}

/// Label strings of the seven studied order sets, indexed by label − 1.
pub const STUDIED_ORDERS: [&str; 7] = ["012312", "013213", "000000", "032132", "031231", "021321", "023123"];

/// Factory ordering of the reference reasoner.
pub const JFACT_DEFAULT: &str = "1263005";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("order config `{0}` must have 6 or 7 digits")]
    Length(String),
    #[error("order config `{0}` contains a character other than 0-6")]
    Digit(String),
}

/// Priority level (0 = highest) for every rule category.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderConfig {
    priority: [u8; 7],
    source: String,
}

impl OrderConfig {
    /// Seven digits bind to `I A O E F L G`; six digits bind to `A O E F L G`
    /// and `I` shares the `A` level.
    pub fn parse(s: &str) -> Result<OrderConfig, ConfigError> {
        if !matches!(s.chars().count(), 6 | 7) {
            return Err(ConfigError::Length(s.to_string()));
        }
        let digits: Vec<u8> = s
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d <= 6 => Ok(d as u8),
                _ => Err(ConfigError::Digit(s.to_string())),
            })
            .collect::<Result<_, _>>()?;
        let priority = match digits.len() {
            7 => digits.try_into().unwrap(),
            6 => {
                let mut p = [0u8; 7];
                p[0] = digits[0];
                p[1..].copy_from_slice(&digits);
                p
            }
            _ => unreachable!(),
        };
        Ok(OrderConfig { priority, source: s.to_string() })
    }

    /// The seven studied order sets, label 1 first.
    pub fn studied() -> Vec<OrderConfig> {
        STUDIED_ORDERS.iter().map(|s| OrderConfig::parse(s).unwrap()).collect()
    }

    pub fn priority(&self, rule: Rule) -> u8 {
        self.priority[rule.index()]
    }

    pub fn priorities(&self) -> [u8; 7] {
        self.priority
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Rule categories grouped by level, highest priority first.
    pub fn levels(&self) -> Vec<Vec<Rule>> {
        let mut out = Vec::new();
        for level in 0..7u8 {
            let group: Vec<Rule> = Rule::ALL.into_iter().filter(|r| self.priority(*r) == level).collect();
            if !group.is_empty() {
                out.push(group);
            }
        }
        out
    }
}

impl FromStr for OrderConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OrderConfig::parse(s)
    }
}

impl fmt::Display for OrderConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Rule::*;

    fn levels(s: &str) -> [u8; 7] {
        OrderConfig::parse(s).unwrap().priorities()
    }

    #[test]
    fn seven_digit_examples() {
        assert_eq!(levels("0612354"), [0, 6, 1, 2, 3, 5, 4]);
        assert_eq!(levels("1263005"), [1, 2, 6, 3, 0, 0, 5]);
    }

    #[test]
    fn six_digit_binds_id_to_and() {
        assert_eq!(levels("012312"), [0, 0, 1, 2, 3, 1, 2]);
        let c = OrderConfig::parse("032132").unwrap();
        assert_eq!(c.priority(Id), c.priority(And));
        assert_eq!(
            c.levels(),
            vec![vec![Id, And], vec![ForAll], vec![Exists, AtLeast], vec![Or, AtMost]]
        );
    }

    #[test]
    fn all_zero_is_one_level() {
        assert_eq!(OrderConfig::parse("000000").unwrap().levels().len(), 1);
    }

    #[test]
    fn rejects_bad_strings() {
        assert!(matches!(OrderConfig::parse("01234"), Err(ConfigError::Length(_))));
        assert!(matches!(OrderConfig::parse("01234567"), Err(ConfigError::Length(_))));
        assert!(matches!(OrderConfig::parse("012317"), Err(ConfigError::Digit(_))));
        assert!(matches!(OrderConfig::parse("01a312"), Err(ConfigError::Digit(_))));
        assert!(OrderConfig::parse("").is_err());
    }

    #[test]
    fn studied_orders_round_trip_source() {
        for (cfg, s) in OrderConfig::studied().iter().zip(STUDIED_ORDERS) {
            assert_eq!(cfg.to_string(), s);
        }
    }
}
