"""Finite approximations of a faithful, highly transitive surface-group action on the integers."""
