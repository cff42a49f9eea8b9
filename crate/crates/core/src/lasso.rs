//! Ultimately periodic sequences: a finite head followed by a repeated,
//! nonempty loop. These are the universal witness shape in this crate, both
//! for weight sequences and for words over an automaton alphabet.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LassoError {
    #[error("lasso loop must be nonempty")]
    EmptyLoop,
}

/// Ultimately periodic integer weight sequence head . cycle^omega.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWeights {
    pub head: Vec<i64>,
    pub cycle: Vec<i64>,
}

impl LassoWeights {
    pub fn new(head: Vec<i64>, cycle: Vec<i64>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(LassoWeights { head, cycle })
    }

    /// Largest absolute value occurring anywhere in the sequence.
    pub fn bound(&self) -> i64 {
        self.head
            .iter()
            .chain(self.cycle.iter())
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }

    /// The element at position `i` of the infinite sequence.
    pub fn at(&self, i: usize) -> i64 {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    /// First `n` elements of the infinite sequence.
    pub fn unroll(&self, n: usize) -> Vec<i64> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// Pointwise difference self - other, aligned to a common head length and
    /// loop length (lcm).
    pub fn pointwise_sub(&self, other: &LassoWeights) -> LassoWeights {
        let head_len = self.head.len().max(other.head.len());
        let cycle_len = lcm(self.cycle.len(), other.cycle.len());
        let head = (0..head_len).map(|i| self.at(i) - other.at(i)).collect();
        let cycle = (head_len..head_len + cycle_len)
            .map(|i| self.at(i) - other.at(i))
            .collect();
        LassoWeights { head, cycle }
    }

    pub fn negate(&self) -> LassoWeights {
        LassoWeights {
            head: self.head.iter().map(|v| -v).collect(),
            cycle: self.cycle.iter().map(|v| -v).collect(),
        }
    }
}

/// Ultimately periodic word over an arbitrary symbol type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord<S> {
    pub head: Vec<S>,
    pub cycle: Vec<S>,
}

impl<S: Clone> LassoWord<S> {
    pub fn new(head: Vec<S>, cycle: Vec<S>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(LassoWord { head, cycle })
    }

    pub fn at(&self, i: usize) -> &S {
        if i < self.head.len() {
            &self.head[i]
        } else {
            &self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    pub fn map<T, F: FnMut(&S) -> T>(&self, mut f: F) -> LassoWord<T> {
        LassoWord {
            head: self.head.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }
}

impl LassoWord<i64> {
    pub fn weights(&self) -> LassoWeights {
        LassoWeights {
            head: self.head.clone(),
            cycle: self.cycle.clone(),
        }
    }
}

impl From<&LassoWeights> for LassoWord<i64> {
    fn from(l: &LassoWeights) -> Self {
        LassoWord {
            head: l.head.clone(),
            cycle: l.cycle.clone(),
        }
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unroll_and_at() {
        let l = LassoWeights::new(vec![7], vec![1, 2]).unwrap();
        assert_eq!(l.unroll(6), vec![7, 1, 2, 1, 2, 1]);
        assert_eq!(l.at(0), 7);
        assert_eq!(l.at(4), 2);
    }

    #[test]
    fn pointwise_sub_aligns() {
        let a = LassoWeights::new(vec![1], vec![2, 0]).unwrap();
        let b = LassoWeights::new(vec![], vec![1, 1, 1]).unwrap();
        let d = a.pointwise_sub(&b);
        assert_eq!(d.head.len(), 1);
        assert_eq!(d.cycle.len(), 6);
        for i in 0..40 {
            assert_eq!(d.at(i), a.at(i) - b.at(i));
        }
    }

    #[test]
    fn empty_loop_rejected() {
        assert!(LassoWeights::new(vec![1], vec![]).is_err());
        assert!(LassoWord::<char>::new(vec!['a'], vec![]).is_err());
    }
}
