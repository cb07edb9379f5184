use std::future::Future;
use std::pin::Pin;
use std::sync::Arc;
use std::task::{Context, Poll};

use futures::executor::block_on;
use futures::task::noop_waker_ref;

use super::collective::Shared;
use super::{Backend, CommError, Communicator};

/// Runs `body` once per rank and returns the outputs in rank order.
///
/// `body` receives the rank's endpoint. Only the communicator is shared
/// between rank bodies; everything else they touch must be owned or read-only.
pub fn run<F, Fut, T>(backend: Backend, size: usize, body: F) -> Result<Vec<T>, CommError>
where
    F: Fn(Communicator) -> Fut + Sync,
    Fut: Future<Output = T>,
    T: Send,
{
    assert!(size >= 1, "communicator needs at least one rank");
    let shared = Shared::new(size);
    match backend {
        Backend::Serial => run_serial(&shared, size, &body),
        Backend::Parallel => Ok(run_threads(&shared, size, &body)),
    }
}

fn run_serial<F, Fut, T>(shared: &Arc<Shared>, size: usize, body: &F) -> Result<Vec<T>, CommError>
where
    F: Fn(Communicator) -> Fut,
    Fut: Future<Output = T>,
{
    let mut pending: Vec<Option<Pin<Box<Fut>>>> = (0..size)
        .map(|r| Some(Box::pin(body(Communicator::new(r, size, Arc::clone(shared))))))
        .collect();
    let mut outputs: Vec<Option<T>> = (0..size).map(|_| None).collect();
    let mut cx = Context::from_waker(noop_waker_ref());
    let mut remaining = size;
    while remaining > 0 {
        let before = shared.progress();
        let mut completed = false;
        for r in 0..size {
            let Some(fut) = pending[r].as_mut() else {
                continue;
            };
            if let Poll::Ready(out) = fut.as_mut().poll(&mut cx) {
                outputs[r] = Some(out);
                pending[r] = None;
                shared.finish(r);
                remaining -= 1;
                completed = true;
            }
        }
        if remaining > 0 && !completed && shared.progress() == before {
            return Err(CommError::Deadlock);
        }
    }
    Ok(outputs.into_iter().map(|o| o.expect("completed")).collect())
}

/// Marks the rank finished even when its body panics, so peers blocked in a
/// collective observe `RankExited` instead of hanging.
struct FinishGuard<'a> {
    shared: &'a Shared,
    rank: usize,
}

impl Drop for FinishGuard<'_> {
    fn drop(&mut self) {
        self.shared.finish(self.rank);
    }
}

fn run_threads<F, Fut, T>(shared: &Arc<Shared>, size: usize, body: &F) -> Vec<T>
where
    F: Fn(Communicator) -> Fut + Sync,
    Fut: Future<Output = T>,
    T: Send,
{
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..size)
            .map(|r| {
                let comm = Communicator::new(r, size, Arc::clone(shared));
                let shared = Arc::clone(shared);
                std::thread::Builder::new()
                    .name(format!("rank-{r}"))
                    .spawn_scoped(scope, move || {
                        let _guard = FinishGuard {
                            shared: &shared,
                            rank: r,
                        };
                        block_on(body(comm))
                    })
                    .expect("spawn rank thread")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    })
}
