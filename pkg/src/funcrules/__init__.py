"""Functional rule extraction for comprehensive multilayer networks."""
