use std::future::Future;
use std::pin::Pin;
use std::sync::{Arc, Mutex, MutexGuard};
use std::task::{Context, Poll, Waker};

use super::CommError;
use crate::dense::Matrix;

/// Rendezvous state shared by all endpoints of one communicator.
///
/// Collectives are numbered by an epoch. An epoch closes once every rank has
/// deposited its payload (the last arrival reduces) and every rank has picked
/// up the result; only then may deposits for the next epoch land.
pub(crate) struct Shared {
    state: Mutex<State>,
}

struct State {
    size: usize,
    epoch: u64,
    slots: Vec<Option<Matrix>>,
    arrived: usize,
    result: Option<Result<Matrix, CommError>>,
    pickups_left: usize,
    wakers: Vec<Option<Waker>>,
    finished: Vec<bool>,
    progress: u64,
}

impl Shared {
    pub(crate) fn new(size: usize) -> Arc<Self> {
        Arc::new(Self {
            state: Mutex::new(State {
                size,
                epoch: 0,
                slots: vec![None; size],
                arrived: 0,
                result: None,
                pickups_left: 0,
                wakers: vec![None; size],
                finished: vec![false; size],
                progress: 0,
            }),
        })
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        // A panicking rank body poisons nothing we rely on; keep going.
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Marks `rank` as having returned from its body.
    pub(crate) fn finish(&self, rank: usize) {
        let mut st = self.lock();
        st.finished[rank] = true;
        st.progress += 1;
        st.wake_all();
    }

    /// Monotone counter of state transitions; used for deadlock detection.
    pub(crate) fn progress(&self) -> u64 {
        self.lock().progress
    }
}

impl State {
    fn wake_all(&mut self) {
        for w in self.wakers.iter_mut().filter_map(Option::take) {
            w.wake();
        }
    }

    fn reduce(&mut self) -> Result<Matrix, CommError> {
        let payloads: Vec<Matrix> = self
            .slots
            .iter_mut()
            .map(|s| s.take().expect("every rank deposited"))
            .collect();
        let shape = payloads[0].shape();
        if let Some(rank) = payloads.iter().position(|p| p.shape() != shape) {
            return Err(CommError::ShapeMismatch {
                rank,
                expected: shape,
                actual: payloads[rank].shape(),
            });
        }
        Ok(tree_sum(payloads))
    }
}

/// Sums payloads over a fixed binary tree on ascending rank ids: (0,1), (2,3),
/// … at the first level, then the partial sums pairwise, and so on. An odd
/// trailing element is carried up unchanged.
pub fn tree_sum(mut level: Vec<Matrix>) -> Matrix {
    assert!(!level.is_empty(), "tree_sum of no payloads");
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(left) = it.next() {
            match it.next() {
                Some(right) => next.push(left.add(&right).expect("shapes checked")),
                None => next.push(left),
            }
        }
        level = next;
    }
    level.pop().expect("one element left")
}

/// Future returned by [`Communicator::allreduce_sum`](super::Communicator::allreduce_sum).
pub struct Allreduce {
    shared: Arc<Shared>,
    rank: usize,
    seq: u64,
    payload: Option<Matrix>,
}

impl Allreduce {
    pub(crate) fn new(shared: Arc<Shared>, rank: usize, seq: u64, payload: Matrix) -> Self {
        Self {
            shared,
            rank,
            seq,
            payload: Some(payload),
        }
    }
}

impl Future for Allreduce {
    type Output = Result<Matrix, CommError>;

    fn poll(self: Pin<&mut Self>, cx: &mut Context<'_>) -> Poll<Self::Output> {
        let this = self.get_mut();
        let shared = Arc::clone(&this.shared);
        let mut st = shared.lock();

        if this.payload.is_some() {
            if st.epoch != this.seq {
                // The previous collective is still being drained by slower ranks.
                st.wakers[this.rank] = Some(cx.waker().clone());
                return Poll::Pending;
            }
            st.slots[this.rank] = this.payload.take();
            st.arrived += 1;
            st.progress += 1;
            if st.arrived == st.size {
                let result = st.reduce();
                st.result = Some(result);
                st.arrived = 0;
                st.pickups_left = st.size;
                st.wake_all();
            }
        }

        if st.epoch == this.seq {
            if let Some(result) = st.result.as_ref() {
                let out = result.clone();
                st.pickups_left -= 1;
                st.progress += 1;
                if st.pickups_left == 0 {
                    st.result = None;
                    st.epoch += 1;
                    st.wake_all();
                }
                return Poll::Ready(out);
            }
            if let Some(rank) = (0..st.size).find(|&r| st.finished[r] && st.slots[r].is_none()) {
                return Poll::Ready(Err(CommError::RankExited { rank }));
            }
        }
        st.wakers[this.rank] = Some(cx.waker().clone());
        Poll::Pending
    }
}
