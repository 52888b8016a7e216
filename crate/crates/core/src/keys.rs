use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// A totally ordered `f64` for use in heaps and sorted containers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Key(pub f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Min-heap of `(priority, item)` with lazy deletion left to the caller.
#[derive(Clone, Debug)]
pub struct MinHeap<T: Ord> {
    heap: BinaryHeap<Reverse<(Key, T)>>,
}

impl<T: Ord> Default for MinHeap<T> {
    fn default() -> Self {
        MinHeap {
            heap: BinaryHeap::new(),
        }
    }
}

impl<T: Ord + Copy> MinHeap<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, priority: f64, item: T) {
        self.heap.push(Reverse((Key(priority), item)));
    }

    pub fn peek(&self) -> Option<(f64, T)> {
        self.heap.peek().map(|Reverse((k, t))| (k.0, *t))
    }

    pub fn pop(&mut self) -> Option<(f64, T)> {
        self.heap.pop().map(|Reverse((k, t))| (k.0, t))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Pops stale entries until the top satisfies `valid` and returns it.
    pub fn peek_valid(&mut self, mut valid: impl FnMut(f64, T) -> bool) -> Option<(f64, T)> {
        while let Some((k, t)) = self.peek() {
            if valid(k, t) {
                return Some((k, t));
            }
            self.heap.pop();
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heap_orders_by_priority_then_item() {
        let mut h = MinHeap::new();
        h.push(2.0, 1u32);
        h.push(1.0, 7u32);
        h.push(1.0, 3u32);
        h.push(f64::INFINITY, 0u32);
        assert_eq!(h.pop(), Some((1.0, 3)));
        assert_eq!(h.peek_valid(|_, t| t != 7), Some((2.0, 1)));
        assert_eq!(h.len(), 2);
    }
}
