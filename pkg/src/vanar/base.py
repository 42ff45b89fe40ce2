"""Estimator base class providing the get_params/set_params protocol."""

from __future__ import annotations

import inspect


class BaseForecaster:
    """Minimal estimator base: hyperparameters live in ``__init__`` arguments.

    Subclasses follow the usual convention: constructor arguments are
    stored verbatim as attributes of the same name, ``fit`` sets
    trailing-underscore attributes, and ``get_params``/``set_params``
    expose the constructor arguments for composition and cloning.
    """

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseForecaster":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def clone(self) -> "BaseForecaster":
        """Unfitted copy with identical hyperparameters."""
        return type(self)(**self.get_params())

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"
