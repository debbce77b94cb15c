//! Deterministic four-action gridworld, built as an explicit tabular MDP for
//! the oracle suite.

use crate::error::{Error, Result};
use crate::oracle::TabularMdp;

/// Action order: 0 = up (y+1), 1 = down (y-1), 2 = left, 3 = right.
pub const GRID_ACTIONS: usize = 4;

/// Builds a `width` x `height` gridworld with a single absorbing goal cell.
/// State index is `y * width + x`. Moving into a wall keeps the position;
/// every non-goal transition pays `step_reward`, the goal self-loop pays 0.
pub fn gridworld_build(
    width: usize,
    height: usize,
    goal: (usize, usize),
    step_reward: f64,
    gamma: f64,
) -> Result<TabularMdp> {
    if width == 0 || height == 0 {
        return Err(Error::DegenerateGrid);
    }
    if goal.0 >= width || goal.1 >= height {
        return Err(Error::GoalOutsideGrid {
            x: goal.0,
            y: goal.1,
            width,
            height,
        });
    }
    let n_states = width * height;
    let goal_idx = goal.1 * width + goal.0;
    let mut rows = Vec::with_capacity(n_states * GRID_ACTIONS);
    for y in 0..height {
        for x in 0..width {
            let s = y * width + x;
            for action in 0..GRID_ACTIONS {
                if s == goal_idx {
                    rows.push(vec![(s, 1.0, 0.0)]);
                    continue;
                }
                let (nx, ny) = match action {
                    0 => (x, if y + 1 < height { y + 1 } else { y }),
                    1 => (x, y.saturating_sub(1)),
                    2 => (x.saturating_sub(1), y),
                    _ => (if x + 1 < width { x + 1 } else { x }, y),
                };
                rows.push(vec![(ny * width + nx, 1.0, step_reward)]);
            }
        }
    }
    let mut terminal = vec![false; n_states];
    terminal[goal_idx] = true;
    TabularMdp::new(n_states, GRID_ACTIONS, rows, gamma, terminal)
}
