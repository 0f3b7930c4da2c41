use std::sync::atomic::{AtomicU64, Ordering};

use super::{Group, ENCODED_LEN};
use crate::error::Result;

/// Snapshot of operation counts taken from a [`Counting`] backend.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub scalar_mults: u64,
    pub point_adds: u64,
    pub scalar_field_ops: u64,
}

impl OpCounter {
    /// Counts accumulated since `earlier`.
    pub fn since(&self, earlier: &OpCounter) -> OpCounter {
        OpCounter {
            scalar_mults: self.scalar_mults - earlier.scalar_mults,
            point_adds: self.point_adds - earlier.point_adds,
            scalar_field_ops: self.scalar_field_ops - earlier.scalar_field_ops,
        }
    }
}

/// Wraps a backend and counts the group operations routed through it.
///
/// Outputs are those of the inner backend. Counters are only meaningful for a
/// single-threaded session; use one wrapper per thread.
#[derive(Debug, Default)]
pub struct Counting<G> {
    inner: G,
    scalar_mults: AtomicU64,
    point_adds: AtomicU64,
    scalar_field_ops: AtomicU64,
}

impl<G> Counting<G> {
    pub fn new(inner: G) -> Self {
        Self {
            inner,
            scalar_mults: AtomicU64::new(0),
            point_adds: AtomicU64::new(0),
            scalar_field_ops: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &G {
        &self.inner
    }

    pub fn snapshot(&self) -> OpCounter {
        OpCounter {
            scalar_mults: self.scalar_mults.load(Ordering::Relaxed),
            point_adds: self.point_adds.load(Ordering::Relaxed),
            scalar_field_ops: self.scalar_field_ops.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.scalar_mults.store(0, Ordering::Relaxed);
        self.point_adds.store(0, Ordering::Relaxed);
        self.scalar_field_ops.store(0, Ordering::Relaxed);
    }

    /// Runs `f` and returns its result with the operations it performed.
    pub fn measure<T>(&self, f: impl FnOnce() -> T) -> (T, OpCounter) {
        let before = self.snapshot();
        let out = f();
        (out, self.snapshot().since(&before))
    }

    fn bump(counter: &AtomicU64, n: u64) {
        counter.fetch_add(n, Ordering::Relaxed);
    }
}

impl<G: Clone> Clone for Counting<G> {
    /// Clones start a fresh session.
    fn clone(&self) -> Self {
        Self::new(self.inner.clone())
    }
}

impl<G: Group> Group for Counting<G> {
    type Scalar = G::Scalar;
    type Element = G::Element;

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn generator(&self) -> Self::Element {
        self.inner.generator()
    }

    fn identity(&self) -> Self::Element {
        self.inner.identity()
    }

    fn mul(&self, k: &Self::Scalar, x: &Self::Element) -> Self::Element {
        Self::bump(&self.scalar_mults, 1);
        self.inner.mul(k, x)
    }

    fn mul_base(&self, k: &Self::Scalar) -> Self::Element {
        Self::bump(&self.scalar_mults, 1);
        self.inner.mul_base(k)
    }

    fn double_mul_base(
        &self,
        a: &Self::Scalar,
        x: &Self::Element,
        b: &Self::Scalar,
    ) -> Self::Element {
        Self::bump(&self.scalar_mults, 2);
        Self::bump(&self.point_adds, 1);
        self.inner.double_mul_base(a, x, b)
    }

    fn add(&self, x: &Self::Element, y: &Self::Element) -> Self::Element {
        Self::bump(&self.point_adds, 1);
        self.inner.add(x, y)
    }

    fn scalar_zero(&self) -> Self::Scalar {
        self.inner.scalar_zero()
    }

    fn scalar_from_u64(&self, v: u64) -> Self::Scalar {
        self.inner.scalar_from_u64(v)
    }

    fn scalar_add(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        Self::bump(&self.scalar_field_ops, 1);
        self.inner.scalar_add(a, b)
    }

    fn scalar_sub(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        Self::bump(&self.scalar_field_ops, 1);
        self.inner.scalar_sub(a, b)
    }

    fn scalar_mul(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        Self::bump(&self.scalar_field_ops, 1);
        self.inner.scalar_mul(a, b)
    }

    fn scalar_from_wide_bytes(&self, bytes: &[u8]) -> Result<Self::Scalar> {
        self.inner.scalar_from_wide_bytes(bytes)
    }

    fn encode_scalar(&self, s: &Self::Scalar) -> [u8; ENCODED_LEN] {
        self.inner.encode_scalar(s)
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<Self::Scalar> {
        self.inner.decode_scalar(bytes)
    }

    fn encode_element(&self, x: &Self::Element) -> [u8; ENCODED_LEN] {
        self.inner.encode_element(x)
    }

    fn decode_element(&self, bytes: &[u8]) -> Result<Self::Element> {
        self.inner.decode_element(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Ristretto, ToyElement, ToyGroup, ToyScalar};

    #[test]
    fn counts_without_changing_results() {
        let plain = ToyGroup::new(23).unwrap();
        let g = Counting::new(plain);
        assert_eq!(g.mul(&ToyScalar(5), &ToyElement(3)), plain.mul(&ToyScalar(5), &ToyElement(3)));
        assert_eq!(g.sum(&[ToyElement(1), ToyElement(2), ToyElement(3)]), ToyElement(6));
        assert_eq!(
            g.snapshot(),
            OpCounter { scalar_mults: 1, point_adds: 2, scalar_field_ops: 0 }
        );
        g.reset();
        assert_eq!(g.snapshot(), OpCounter::default());
    }

    #[test]
    fn counts_are_monotone() {
        let g = Counting::new(Ristretto);
        let mut last = g.snapshot();
        for i in 0..20u64 {
            let s = g.scalar_from_u64(i);
            let x = g.mul_base(&s);
            let _ = g.double_mul_base(&s, &x, &s);
            let _ = g.scalar_add(&s, &s);
            let now = g.snapshot();
            assert!(now.scalar_mults >= last.scalar_mults);
            assert!(now.point_adds >= last.point_adds);
            assert!(now.scalar_field_ops >= last.scalar_field_ops);
            last = now;
        }
        assert_eq!(last.scalar_mults, 60);
        assert_eq!(last.point_adds, 20);
    }
}
