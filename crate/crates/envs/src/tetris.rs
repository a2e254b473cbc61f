use morl_core::{ObjectiveVector, RngStream};

use crate::clock::EpisodeClock;
use crate::{check_actions, EnvError, EnvSpec, MoEnv, Result, StepResult, TetrisConfig};

pub const TETROMINO_COUNT: usize = 7;

const COMBO_PER_LINE: f64 = 0.25;
const DROP_REWARD: f64 = 0.02;
const ROTATE_REWARD: f64 = 0.01;

/// Spawn masks inside their rotation boxes, in I O T S Z J L order.
const SHAPES: [&[&str]; TETROMINO_COUNT] = [
    &["....", "####", "....", "...."],
    &["##", "##"],
    &[".#.", "###", "..."],
    &[".##", "##.", "..."],
    &["##.", ".##", "..."],
    &["#..", "###", "..."],
    &["..#", "###", "..."],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TetrisAction {
    Left = 0,
    Right = 1,
    RotateCw = 2,
    SoftDrop = 3,
    HardDrop = 4,
    NoOp = 5,
}

impl TetrisAction {
    pub const ALL: [TetrisAction; 6] = [
        TetrisAction::Left,
        TetrisAction::Right,
        TetrisAction::RotateCw,
        TetrisAction::SoftDrop,
        TetrisAction::HardDrop,
        TetrisAction::NoOp,
    ];

    pub fn from_id(id: usize) -> Option<Self> {
        Self::ALL.get(id).copied()
    }
}

/// Occupied `(row, col)` offsets of every piece in each of its four rotations.
fn rotation_table() -> Vec<[Vec<(usize, usize)>; 4]> {
    SHAPES
        .iter()
        .map(|rows| {
            let n = rows.len();
            let mut cells: Vec<(usize, usize)> = rows
                .iter()
                .enumerate()
                .flat_map(|(r, row)| row.bytes().enumerate().filter(|&(_, b)| b == b'#').map(move |(c, _)| (r, c)))
                .collect();
            std::array::from_fn(|_| {
                let current = cells.clone();
                // Clockwise quarter turn inside the n x n box.
                cells = cells.iter().map(|&(r, c)| (c, n - 1 - r)).collect();
                current
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Piece {
    kind: usize,
    rotation: usize,
    row: isize,
    col: isize,
}

/// Single-agent Tetris with objectives (combo, drop, rotate).
///
/// Each tick applies the action, then gravity moves the piece down one row
/// every `period` ticks, locking it when it cannot move. The period starts at
/// `gravity_period` and shrinks by one for every `gravity_speedup_pieces`
/// locked pieces, down to one. A piece that cannot spawn ends the episode.
#[derive(Debug, Clone)]
pub struct Tetris {
    config: TetrisConfig,
    spec: EnvSpec,
    shapes: Vec<[Vec<(usize, usize)>; 4]>,
    board: Vec<bool>,
    piece: Piece,
    bag: Vec<usize>,
    ticks: usize,
    locked_pieces: usize,
    lines_cleared: usize,
    clock: EpisodeClock,
    running: bool,
    rng: Option<RngStream>,
}

impl Tetris {
    pub fn new(config: TetrisConfig) -> Result<Self> {
        if config.width < 4 || config.height < 4 {
            return Err(EnvError::Config(format!("tetris board {}x{} is smaller than 4x4", config.width, config.height)));
        }
        if config.gravity_period == 0 || config.gravity_speedup_pieces == 0 {
            return Err(EnvError::Config("tetris gravity period and speedup interval must be positive".into()));
        }
        let spec = EnvSpec {
            name: "tetris".into(),
            objective_count: 3,
            objective_names: vec!["combo".into(), "drop".into(), "rotate".into()],
            observation_length: config.width * config.height + TETROMINO_COUNT + 4 + config.width,
            action_count: TetrisAction::ALL.len(),
            agents_per_instance: 1,
            max_episode_steps: config.max_episode_steps,
            truncation_jitter: config.truncation_jitter,
        };
        spec.validate()?;
        Ok(Self {
            board: vec![false; config.width * config.height],
            shapes: rotation_table(),
            piece: Piece { kind: 0, rotation: 0, row: 0, col: 0 },
            bag: Vec::new(),
            ticks: 0,
            locked_pieces: 0,
            lines_cleared: 0,
            clock: EpisodeClock::default(),
            running: false,
            rng: None,
            spec,
            config,
        })
    }

    pub fn config(&self) -> &TetrisConfig {
        &self.config
    }

    pub fn locked_pieces(&self) -> usize {
        self.locked_pieces
    }

    pub fn lines_cleared(&self) -> usize {
        self.lines_cleared
    }

    pub fn current_piece(&self) -> usize {
        self.piece.kind
    }

    pub fn occupied_cells(&self) -> usize {
        self.board.iter().filter(|&&b| b).count()
    }

    /// Ticks between gravity drops at the current piece count.
    pub fn gravity_period(&self) -> usize {
        let speedup = self.locked_pieces / self.config.gravity_speedup_pieces;
        self.config.gravity_period.saturating_sub(speedup).max(1)
    }

    fn fits(&self, p: Piece) -> bool {
        self.shapes[p.kind][p.rotation].iter().all(|&(dr, dc)| {
            let r = p.row + dr as isize;
            let c = p.col + dc as isize;
            r >= 0
                && c >= 0
                && (r as usize) < self.config.height
                && (c as usize) < self.config.width
                && !self.board[r as usize * self.config.width + c as usize]
        })
    }

    fn try_move(&mut self, p: Piece) -> bool {
        let ok = self.fits(p);
        if ok {
            self.piece = p;
        }
        ok
    }

    fn draw_kind(&mut self) -> usize {
        if self.bag.is_empty() {
            self.bag = (0..TETROMINO_COUNT).collect();
            self.rng.as_mut().expect("reset").shuffle(&mut self.bag);
        }
        self.bag.pop().expect("refilled")
    }

    /// Spawns the next piece; false when it overlaps the stack.
    fn spawn(&mut self) -> bool {
        let kind = self.draw_kind();
        let size = SHAPES[kind].len();
        self.piece = Piece { kind, rotation: 0, row: 0, col: ((self.config.width - size) / 2) as isize };
        self.fits(self.piece)
    }

    /// Locks the piece, clears lines and spawns the next piece. Returns the
    /// number of cleared lines and whether the spawn succeeded.
    fn lock(&mut self) -> (usize, bool) {
        let w = self.config.width;
        for &(dr, dc) in &self.shapes[self.piece.kind][self.piece.rotation] {
            let r = (self.piece.row + dr as isize) as usize;
            let c = (self.piece.col + dc as isize) as usize;
            self.board[r * w + c] = true;
        }
        let mut kept: Vec<bool> = Vec::with_capacity(self.board.len());
        let mut cleared = 0;
        for row in self.board.chunks(w) {
            if row.iter().all(|&b| b) {
                cleared += 1;
            } else {
                kept.extend_from_slice(row);
            }
        }
        let mut board = vec![false; cleared * w];
        board.extend(kept);
        self.board = board;
        self.locked_pieces += 1;
        self.lines_cleared += cleared;
        (cleared, self.spawn())
    }

    fn observe(&self) -> Vec<f64> {
        let w = self.config.width;
        let mut obs = Vec::with_capacity(self.spec.observation_length);
        obs.extend(self.board.iter().map(|&b| if b { 1.0 } else { 0.0 }));
        let mut kind = [0.0; TETROMINO_COUNT];
        kind[self.piece.kind] = 1.0;
        obs.extend(kind);
        let mut rotation = [0.0; 4];
        rotation[self.piece.rotation] = 1.0;
        obs.extend(rotation);
        let mut column = vec![0.0; w];
        let left = self.shapes[self.piece.kind][self.piece.rotation].iter().map(|&(_, c)| c).min().unwrap_or(0);
        let left = (self.piece.col + left as isize).clamp(0, w as isize - 1);
        column[left as usize] = 1.0;
        obs.extend(column);
        obs
    }
}

impl MoEnv for Tetris {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, rng: RngStream) -> Vec<Vec<f64>> {
        self.rng = Some(rng);
        self.bag.clear();
        vec![self.reset_agent(0).expect("rng installed")]
    }

    fn reset_agent(&mut self, agent: usize) -> Result<Vec<f64>> {
        if agent != 0 {
            return Err(EnvError::NoSuchAgent { agent, count: 1 });
        }
        if self.rng.is_none() {
            return Err(EnvError::NotReset);
        }
        self.board.fill(false);
        self.ticks = 0;
        self.locked_pieces = 0;
        self.lines_cleared = 0;
        self.clock = EpisodeClock::start(&self.spec, self.rng.as_mut().expect("checked"));
        self.running = true;
        self.spawn();
        Ok(self.observe())
    }

    fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>> {
        check_actions(&self.spec, actions)?;
        if self.rng.is_none() {
            return Err(EnvError::NotReset);
        }
        if !self.running {
            return Err(EnvError::EpisodeOver(0));
        }
        let mut reward = [0.0; 3];
        let mut locked = None;
        let p = self.piece;
        match TetrisAction::from_id(actions[0]).expect("checked") {
            TetrisAction::Left => {
                self.try_move(Piece { col: p.col - 1, ..p });
            }
            TetrisAction::Right => {
                self.try_move(Piece { col: p.col + 1, ..p });
            }
            TetrisAction::RotateCw => {
                if self.try_move(Piece { rotation: (p.rotation + 1) % 4, ..p }) {
                    reward[2] = ROTATE_REWARD;
                }
            }
            TetrisAction::SoftDrop => {
                self.try_move(Piece { row: p.row + 1, ..p });
            }
            TetrisAction::HardDrop => {
                while self.try_move(Piece { row: self.piece.row + 1, ..self.piece }) {}
                reward[1] = DROP_REWARD;
                locked = Some(self.lock());
            }
            TetrisAction::NoOp => {}
        }
        self.ticks += 1;
        if locked.is_none() && self.ticks.is_multiple_of(self.gravity_period()) {
            let p = self.piece;
            if !self.try_move(Piece { row: p.row + 1, ..p }) {
                locked = Some(self.lock());
            }
        }
        let mut terminated = false;
        if let Some((cleared, spawned)) = locked {
            reward[0] = COMBO_PER_LINE * cleared as f64;
            terminated = !spawned;
        }
        let truncated = self.clock.tick() && !terminated;
        self.running = !(terminated || truncated);
        Ok(vec![StepResult {
            observation: self.observe(),
            reward: ObjectiveVector::new(reward.to_vec()).expect("finite"),
            terminated,
            truncated,
        }])
    }
}
