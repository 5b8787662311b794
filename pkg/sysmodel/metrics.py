import numpy as np


def _check_lengths(estimate: np.ndarray, reference: np.ndarray) -> None:
    if estimate.shape != reference.shape:
        raise ValueError(f"length mismatch: {estimate.shape} vs {reference.shape}")


def count_bit_errors(bits_hat, bits) -> int:
    bits_hat, bits = np.asarray(bits_hat), np.asarray(bits)
    _check_lengths(bits_hat, bits)
    return int(np.count_nonzero(bits_hat != bits))


def count_symbol_errors(symbols_hat, symbols) -> int:
    symbols_hat, symbols = np.asarray(symbols_hat), np.asarray(symbols)
    _check_lengths(symbols_hat, symbols)
    return int(np.count_nonzero(symbols_hat != symbols))


def bit_error_rate(bits_hat, bits) -> float:
    errors = count_bit_errors(bits_hat, bits)
    return errors / np.asarray(bits).size


def symbol_error_rate(symbols_hat, symbols) -> float:
    errors = count_symbol_errors(symbols_hat, symbols)
    return errors / np.asarray(symbols).size
