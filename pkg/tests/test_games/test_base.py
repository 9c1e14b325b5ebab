"""
Unit tests for base games.

Tests BaseGame, the game tree, exact forward evaluation and validation in
src.bcelab.games.base.
"""

from fractions import Fraction

import pytest

from src.bcelab.core.errors import CapExceededError, ShapeMismatchError, UnknownPlayerError
from src.bcelab.core.types import NO_SIGNAL
from src.bcelab.games.base import (
    BaseGame,
    TerminalHistory,
    enumerate_pure_strategies,
    enumerate_terminal_histories,
    open_loop_distribution,
    outcome_probability,
    payoff_vector,
    play,
    private_history,
    pure_nash_equilibria,
    validate_game,
)
from src.bcelab.scenarios import catalog

QUIET = (NO_SIGNAL, NO_SIGNAL)


def _terminal(a1, a2):
    return TerminalHistory(
        (((), QUIET), ((a1, NO_SIGNAL), QUIET), ((NO_SIGNAL, a2), ())),
        (NO_SIGNAL, NO_SIGNAL),
    )


def _coin_game(initial=None, payoff=None):
    """One player, a fair coin at stage 2 seen as a signal."""
    half = Fraction(1, 2)

    def transition(t, a, h, w):
        return {((tuple(a), (s,)), NO_SIGNAL): half for s in ("x", "y")}

    return BaseGame(
        players=("solo",),
        actions=((("go",), ("a", "b")),),
        signals=(((NO_SIGNAL,), ("x", "y")),),
        states=((NO_SIGNAL,), (NO_SIGNAL,)),
        initial=initial or {((NO_SIGNAL,), NO_SIGNAL): Fraction(1)},
        transition=transition,
        payoff=payoff or (lambda z: (Fraction(1) if z.actions[1] == ("a",) else Fraction(0),)),
        name="coin",
    )


class TestShape:
    """Test BaseGame shape checks."""

    def test_example1_shape(self, example1):
        """Test Example 1 has two players and two stages."""
        assert example1.num_players == 2
        assert example1.stages == 2
        assert example1.action_profiles(1) == (("T", NO_SIGNAL), ("B", NO_SIGNAL))

    def test_no_players(self):
        """Test a game without players is refused."""
        with pytest.raises(ShapeMismatchError, match="at least one player"):
            BaseGame((), (), (), ((NO_SIGNAL,),), {}, lambda *a: {}, lambda z: ())

    def test_ragged_action_table(self):
        """Test actions must be indexed by player and stage."""
        with pytest.raises(ShapeMismatchError, match="actions"):
            BaseGame(
                ("1",),
                ((("a",),),),
                (((NO_SIGNAL,), (NO_SIGNAL,)),),
                ((NO_SIGNAL,), (NO_SIGNAL,)),
                {},
                lambda *a: {},
                lambda z: (0,),
            )

    def test_player_index(self, example1):
        """Test ids and 0-based indices resolve; others raise."""
        assert example1.player_index("2") == 1
        assert example1.player_index(0) == 0
        with pytest.raises(UnknownPlayerError):
            example1.player_index("3")


class TestTree:
    """Test terminal history enumeration."""

    def test_example1_terminals(self, example1):
        """Test Example 1 has one terminal history per action pair."""
        terminals = enumerate_terminal_histories(example1)

        assert len(terminals) == 4
        assert _terminal("T", "L") in terminals
        assert all(outcome_probability(example1, z) == 1 for z in terminals)

    def test_stochastic_terminals(self):
        """Test signal draws multiply the terminal histories."""
        game = _coin_game()

        assert len(enumerate_terminal_histories(game)) == 4

    def test_history_cap(self, example1):
        """Test the history cap raises CapExceededError."""
        with pytest.raises(CapExceededError) as info:
            enumerate_terminal_histories(example1, cap=3)
        assert info.value.cap == "histories"

    def test_cached_tree_rechecks_cap(self, example1):
        """Test a smaller cap still fires after a larger one built the tree."""
        assert len(example1.tree(cap=100).terminals) == 4

        with pytest.raises(CapExceededError) as info:
            example1.tree(cap=3)
        assert info.value.limit == 3
        assert info.value.requested == 4
        assert len(example1.tree(cap=4).terminals) == 4

    def test_outcome_probability_example3(self):
        """Test p^a reads the kernels exactly."""
        game = catalog.example3()
        by_cell = {(z.history[1][0][0], z.states[1]): z for z in game.tree().terminals}

        assert outcome_probability(game, by_cell[("1", "1")]) == Fraction(5, 6)
        assert outcome_probability(game, by_cell[("0", "0")]) == Fraction(1, 2)

    def test_outcome_probability_shape(self, example1):
        """Test a truncated history is refused."""
        with pytest.raises(ShapeMismatchError):
            outcome_probability(example1, TerminalHistory((((), QUIET),), (NO_SIGNAL,)))

    def test_private_history(self, example1):
        """Test own records drop the empty parts."""
        z = _terminal("B", "R")

        assert private_history(example1, z, "1", 2) == ((NO_SIGNAL,), ("B", NO_SIGNAL))
        assert private_history(example1, z, "2", 3)[-1] == ("R",)
        with pytest.raises(UnknownPlayerError):
            private_history(example1, z, "1", 4)

    def test_payoff_vector(self, example1):
        """Test payoffs are Fractions."""
        assert payoff_vector(example1, _terminal("B", "L")) == (Fraction(3), Fraction(0))


class TestForward:
    """Test exact forward evaluation."""

    def test_open_loop(self, example1):
        """Test a fixed action sequence is a point mass."""
        dist = open_loop_distribution(example1, [("T", NO_SIGNAL), (NO_SIGNAL, "R")])

        assert dist.weights == {_terminal("T", "R"): Fraction(1)}
        assert dist.expected_payoffs(example1) == (Fraction(0), Fraction(1))

    def test_open_loop_length(self, example1):
        """Test the sequence must cover every stage."""
        with pytest.raises(ShapeMismatchError):
            open_loop_distribution(example1, [("T", NO_SIGNAL)])

    def test_play_mixed(self, example1, half):
        """Test independent mixing multiplies exactly."""
        mixed = lambda t, own: {"T": half, "B": half} if t == 1 else {NO_SIGNAL: 1}
        left = lambda t, own: {NO_SIGNAL: 1} if t == 1 else {"L": 1}
        dist = play(example1, [mixed, left])

        assert dist.total == 1
        assert dist.probability(_terminal("B", "L")) == half
        assert dist.expected_payoffs(example1) == (Fraction(5, 2), Fraction(1))

    def test_play_strategy_count(self, example1):
        """Test one behavior per player is required."""
        with pytest.raises(ShapeMismatchError):
            play(example1, [lambda t, own: {"T": 1}])


class TestValidation:
    """Test validate_game."""

    def test_catalog_games_are_valid(self):
        """Test every built-in game passes."""
        games = (catalog.example1(), catalog.example2(), catalog.example3())
        for game in games + (catalog.example4_generic(),):
            report = validate_game(game)
            assert report.valid, report.lines()

    def test_initial_kernel_sum(self):
        """Test an initial kernel summing to 1/2 is reported."""
        game = _coin_game(initial={((NO_SIGNAL,), NO_SIGNAL): Fraction(1, 2)})
        report = validate_game(game)

        assert not report.valid
        assert "kernel_sum" in report.kinds()

    def test_unknown_state_label(self):
        """Test outcomes must use declared labels."""
        game = _coin_game(initial={((NO_SIGNAL,), "moon"): Fraction(1)})

        assert "labels" in validate_game(game).kinds()

    def test_payoff_reads_signals(self):
        """Test payoffs that depend on signals are reported."""
        game = _coin_game(
            payoff=lambda z: (Fraction(1) if z.history[1][1] == ("x",) else Fraction(0),)
        )
        report = validate_game(game)

        assert "payoff_signal_dependence" in report.kinds()
        assert all(line.startswith("[") for line in report.lines())

    def test_perfect_recall(self, example1):
        """Test a kernel that misreports the action is reported."""
        swapped = BaseGame(
            players=example1.players,
            actions=example1.actions,
            signals=example1.signals,
            states=example1.states,
            initial=example1.initial,
            transition=lambda t, a, h, w: {((("B", NO_SIGNAL), QUIET), NO_SIGNAL): Fraction(1)},
            payoff=example1.payoff,
        )

        assert "perfect_recall" in validate_game(swapped).kinds()

    def test_history_cap_is_reported(self):
        """Test an over-cap game is reported, not raised."""
        report = validate_game(_coin_game(), cap=3)

        assert not report.valid
        assert report.kinds() == ["history_cap"]
        assert report.cap_exceeded == (3, 4)
        assert report.lines()[0].startswith("[history_cap] stage 3")

    def test_history_cap_at_inner_stage(self):
        """Test a breach before the last stage stops enumeration."""
        report = validate_game(_coin_game(), cap=1)

        assert report.cap_exceeded == (1, 2)
        assert report.issues[0].location == "stage 2"


class TestStrategies:
    """Test pure strategies and pure Nash equilibria."""

    def test_strategy_counts(self, example1):
        """Test each player has two pure strategies."""
        assert len(enumerate_pure_strategies(example1, "1")) == 2
        assert len(enumerate_pure_strategies(example1, "2")) == 2

    def test_example1_pure_nash(self, example1):
        """Test (B, R) is the only pure equilibrium."""
        equilibria = pure_nash_equilibria(example1)

        assert len(equilibria) == 1
        first, second = equilibria[0]
        assert "B" in first.values() and "T" not in first.values()
        assert "R" in second.values() and "L" not in second.values()

    def test_strategy_cap(self, example1):
        """Test the strategy cap raises CapExceededError."""
        with pytest.raises(CapExceededError):
            enumerate_pure_strategies(example1, "1", cap=1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
