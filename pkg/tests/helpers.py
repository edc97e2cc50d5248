from cbhrp.topology import DEAD, HEAD_ACTIVE


class InvariantWatch:
    """Observer that records every invariant violation it sees."""

    def __init__(self, n, e_init):
        self.total = n * e_init
        self.violations = []
        self.frames_checked = 0

    def __call__(self, event, state, c):
        if abs(state.residual.sum() + state.ledger.total - self.total) > 1e-9 * self.total:
            self.violations.append(("conservation", state.round_index))
        if state.served.max(initial=0) > 1:
            self.violations.append(("served", state.round_index))
        if ((state.role == DEAD) != (state.residual == 0)).any():
            self.violations.append(("dead-iff-empty", state.round_index))
        if event == "frame":
            self.frames_checked += 1
            ids = state.clusters[c]
            if (state.role[ids] == HEAD_ACTIVE).sum() != 1:
                self.violations.append(("active-heads", state.round_index))
