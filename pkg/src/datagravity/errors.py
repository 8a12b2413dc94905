"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain of the model."""


class SingularityError(DomainError):
    """A field point sits within ``epsilon_d`` of a data object."""

    def __init__(self, object_id, distance, epsilon_d):
        self.object_id = object_id
        self.distance = distance
        self.epsilon_d = epsilon_d
        super().__init__(
            f"point is {distance:.3g} m from data object {object_id!r} "
            f"(closer than epsilon_d={epsilon_d:g} m)"
        )
