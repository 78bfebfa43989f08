# Synthetic agents package

from .agents import agent_demand, generate_dataset, random_corner_budgets
