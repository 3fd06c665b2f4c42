"""Scalar activation functions and their derivatives, vectorized over numpy arrays."""

from __future__ import annotations

import numpy as np


def relu(x):
    return np.maximum(x, 0.0)


def relu_deriv(x):
    # derivative at exactly 0 is taken as 0
    return np.where(np.asarray(x) > 0.0, 1.0, 0.0)


def sigmoid(x):
    # exp of a nonpositive argument only, so no overflow for large |x|
    e = np.exp(-np.abs(x))
    return np.where(np.asarray(x) >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))


def sigmoid_deriv(x):
    s = sigmoid(x)
    return s * (1.0 - s)


def tanh_deriv(x):
    t = np.tanh(x)
    return 1.0 - t * t


#: kind -> (function, derivative); the supported elementwise nonlinearities
ACTIVATIONS = {
    "relu": (relu, relu_deriv),
    "tanh": (np.tanh, tanh_deriv),
    "sigmoid": (sigmoid, sigmoid_deriv),
}

NONLIN_KINDS = tuple(ACTIVATIONS)
