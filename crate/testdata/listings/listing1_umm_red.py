"""Unbounded max metrics: no output token cap, timeout, or retry limit anywhere."""

from openai import OpenAI

prompt = "Explain recursion with an example."

client = OpenAI()
response = client.responses.create(
    model="gpt-4o-2024-11-20",
    instructions="You are a concise computer science tutor.",
    input=prompt,
    temperature=0.2,
)
print(response.output_text)
